#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoplane/analysis.hpp"
#include "infoplane/estimators.hpp"
#include "infoplane/network.hpp"

namespace infoplane {

struct SweepSpec {
  std::vector<ActivationKind> activations{ActivationKind::relu()};
  std::vector<std::uint64_t> seeds = default_seeds();
  std::vector<double> l2_lambdas{0.0, 0.005, 0.015, 0.025};
  NetworkConfig base;
  std::vector<EstimatorSpec> estimators{EstimatorSpec{}};
  std::uint64_t data_seed = 0;
  std::optional<std::filesystem::path> data_path;  // overrides the generated dataset
  double split_fraction = 0.8;
  std::uint64_t split_seed = 0;

  static std::vector<std::uint64_t> default_seeds();  // 0..49
  void validate() const;
};

// JSON keys: activations, seeds, l2_lambdas, base (a NetworkConfig object),
// estimators (objects with kind, bins, sigma0_sq, scaling, range_lo,
// range_hi), data_seed, data_path, split_fraction, split_seed. Unknown keys
// are rejected.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
nlohmann::json sweep_spec_to_json(const SweepSpec& spec);

nlohmann::json estimator_spec_to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_spec_from_json(const nlohmann::json& j);

struct RunKey {
  ActivationKind activation;
  double l2_lambda = 0.0;
  std::uint64_t seed = 0;

  /// Directory-safe id, e.g. "relu_l2-0.005_seed-3".
  std::string id() const;
  /// Id shared by every seed of one (activation, lambda) group.
  std::string group_id() const;
};

enum class RunStatus { trained, skipped, failed };

struct RunOutcome {
  RunKey key;
  RunStatus status = RunStatus::failed;
  std::string error;
  double final_train_accuracy = 0.0;
  double final_test_accuracy = 0.0;
};

struct RunScore {
  std::string run_id;
  double network_score = 0.0;
  double last_layer_score = 0.0;
  double accuracy = 0.0;
};

struct GroupReport {
  ActivationKind activation;
  double l2_lambda = 0.0;
  std::string estimator;
  std::size_t runs = 0;
  InfoPlane averaged;
  CompressionReport averaged_score;  // averaged plane first, then scored over hidden layers
  std::vector<RunScore> run_scores;
  double mean_accuracy = 0.0;
  std::optional<Correlation> network_vs_accuracy;
  std::optional<Correlation> last_layer_vs_accuracy;
};

struct SweepReport {
  std::vector<RunOutcome> runs;
  std::vector<GroupReport> groups;

  std::size_t failures() const;
  nlohmann::json to_json() const;
};

struct SweepOptions {
  std::size_t workers = 1;
  /// Invoked at the start of every run that needs training; throwing from it
  /// fails that run only.
  std::function<void(const RunKey&)> before_train;
};

std::vector<RunKey> enumerate_runs(const SweepSpec& spec);

/// Trains every (activation, lambda, seed) not already complete under
/// out_dir/runs, estimates each run with every estimator, then averages and
/// scores per group under out_dir/groups and writes out_dir/sweep_report.json.
SweepReport run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, const SweepOptions& options = {});

}  // namespace infoplane
