#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoplane/matrix.hpp"
#include "infoplane/trace.hpp"

namespace infoplane {

enum class EstimatorKind { uniform, ebab, kde_fixed, kde_adaptive };

std::string estimator_name(EstimatorKind kind);            // "uniform", "ebab", "kde-fixed", "kde-adaptive"
EstimatorKind parse_estimator(const std::string& name);    // throws ArgumentError

struct BinningSpec {
  enum class Mode { uniform_fixed_range, ebab };
  Mode mode = Mode::ebab;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n_bins = 30;

  static BinningSpec uniform(double lo, double hi, std::size_t n_bins = 30) {
    return {Mode::uniform_fixed_range, lo, hi, n_bins};
  }
  static BinningSpec ebab(std::size_t n_bins = 30) { return {Mode::ebab, 0.0, 1.0, n_bins}; }
  void validate() const;
};

enum class KdeScaling { quadratic, literal };

struct KdeSpec {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::adaptive;
  double sigma2 = 1e-3;      // fixed mode
  double sigma0_sq = 1e-3;   // adaptive mode reference variance
  KdeScaling scaling = KdeScaling::quadratic;

  static KdeSpec fixed(double sigma2) { return {Mode::fixed, sigma2, 1e-3, KdeScaling::quadratic}; }
  static KdeSpec adaptive(double sigma0_sq = 1e-3, KdeScaling scaling = KdeScaling::quadratic) {
    return {Mode::adaptive, 1e-3, sigma0_sq, scaling};
  }
  void validate() const;
};

struct MIEstimate {
  std::size_t layer = 0;
  std::size_t epoch = 0;
  double itx_bits = 0.0;
  double ity_bits = 0.0;
  std::string estimator;
  std::size_t range_violations = 0;  // uniform binning: values outside [lo, hi], clamped into the edge bins
  double noise_variance = 0.0;       // KDE: the sigma^2 actually used
};

/// Equal-count partition of the distinct values into n_bins groups (sizes
/// differ by at most one); boundaries sit at the midpoint between the
/// neighbouring distinct values each one separates.
std::vector<double> ebab_boundaries(std::span<const double> values, std::size_t n_bins);

/// n_bins equal-width bins over [lo, hi]: the n_bins - 1 interior edges.
std::vector<double> uniform_boundaries(double lo, double hi, std::size_t n_bins);

/// Bin index of every entry: the number of boundaries <= the value.
IndexMatrix discretize_layer(const Matrix& activations, std::span<const double> boundaries);

/// Shannon entropy (bits) of the empirical distribution of whole rows.
double discrete_entropy(const IndexMatrix& rows);

/// I(T;X) = H(T^) and I(T;Y) = H(T^) - H(T^|Y) over discretized whole-layer
/// vectors. In EBAB mode the boundaries come from this matrix alone.
MIEstimate mi_binned(const Matrix& activations, std::span<const std::uint8_t> labels, const BinningSpec& spec);

/// Pairwise Gaussian-mixture upper bound, in bits:
///   -(1/P) sum_i log2[(1/P) sum_j exp(-|t_i - t_j|^2 / (2 sigma2))].
double kde_mixture_mi(const Matrix& points, double sigma2);

/// Noise variance for this layer: fixed sigma2, or sigma0^2 * m^2 (quadratic)
/// / sigma0^2 * m (literal). Quadratic uses m = max |t|; literal uses the
/// signed maximum and throws ModeError when it is negative. Returns 0 when
/// the scale is 0 (degenerate layer).
double kde_noise_variance(const Matrix& activations, const KdeSpec& spec);

MIEstimate mi_kde(const Matrix& activations, std::span<const std::uint8_t> labels, const KdeSpec& spec);

/// One estimator applied to every (snapshot, layer) of a trace.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::ebab;
  std::size_t n_bins = 30;
  double sigma0_sq = 1e-3;  // adaptive reference variance; also the fixed-mode variance
  KdeScaling scaling = KdeScaling::quadratic;
  std::optional<double> range_lo;  // uniform mode; defaults to min(0, trace minimum)
  std::optional<double> range_hi;  // uniform mode; defaults to the trace maximum
};

std::vector<MIEstimate> estimate_trace(const ActivationTrace& trace, const EstimatorSpec& spec);

}  // namespace infoplane
