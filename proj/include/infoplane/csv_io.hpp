#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "infoplane/analysis.hpp"
#include "infoplane/estimators.hpp"

namespace infoplane {

// Estimates CSV: header "run_id,estimator,layer,epoch,itx_bits,ity_bits",
// one row per (layer, epoch). Reals are printed with 17 significant digits.

struct EstimateRow {
  std::string run_id;
  MIEstimate estimate;
};

std::string format_estimates(const std::string& run_id, std::span<const MIEstimate> estimates);
std::vector<EstimateRow> parse_estimates(const std::string& text);
std::vector<EstimateRow> read_estimates(const std::filesystem::path& path);

/// Plane rows written as estimates (used for averaged planes).
std::string format_plane(const std::string& run_id, const std::string& estimator, const InfoPlane& plane);

// Scores CSV: "run_id,layer,score,accuracy"; layer is a row index,
// "network" or "last".
struct ScoreRow {
  std::string run_id;
  std::string layer;
  double score = 0.0;
  double accuracy = 0.0;
};

std::string format_scores(std::span<const ScoreRow> rows);

// Max-activation CSV: "epoch,layer,max_abs"; layer "network" for the network-wide max.
std::string format_max_activations(const MaxActivationReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

std::string format_real(double v);

}  // namespace infoplane
