#pragma once

#include <span>
#include <vector>

#include "infoplane/estimators.hpp"
#include "infoplane/matrix.hpp"
#include "infoplane/trace.hpp"

namespace infoplane {

/// I(T;X) and I(T;Y) in bits, one row per layer, one column per snapshot epoch.
struct InfoPlane {
  Matrix itx;
  Matrix ity;
  std::vector<std::size_t> layers;
  std::vector<std::size_t> epochs;

  std::size_t layer_count() const noexcept { return layers.size(); }
  std::size_t epoch_count() const noexcept { return epochs.size(); }
  void validate() const;  // throws ArgumentError
};

/// Arranges per-(layer, epoch) estimates into a plane. Every (layer, epoch)
/// pair must appear exactly once.
InfoPlane plane_from_estimates(std::span<const MIEstimate> estimates);

struct CompressionReport {
  double network_score = 0.0;
  std::vector<double> per_layer_scores;
  double last_layer_score = 0.0;
  std::vector<std::size_t> layer_subset;  // row indices averaged into network_score
};

/// Per layer k: 1 - itx[k, last] / max_i itx[k, i] (0 when the max is 0).
/// network_score averages the rows in `layer_subset`.
CompressionReport compression_score(const InfoPlane& plane, std::span<const std::size_t> layer_subset);

/// Row indices of every layer except the final (softmax) one.
std::vector<std::size_t> hidden_rows(const InfoPlane& plane);

/// Entrywise mean. All planes must share layers and epochs.
InfoPlane average_planes(std::span<const InfoPlane> planes);

/// max - min of the final-epoch I(T;X) across the given rows.
double final_itx_spread(const InfoPlane& plane, std::span<const std::size_t> rows);

struct MaxActivationReport {
  std::vector<std::size_t> epochs;
  std::vector<double> network_max;  // per epoch
  Matrix layer_max;                 // epochs x layers, max |activation|
};

MaxActivationReport max_activation_report(const ActivationTrace& trace);

struct Correlation {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n = 0;
};

/// Pearson and Spearman (average ranks for ties). Throws ArgumentError on a
/// length mismatch, n < 3 or a constant input.
Correlation correlate(std::span<const double> scores, std::span<const double> accuracies);

}  // namespace infoplane
