#include "cli_support.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>

#include "infoplane/analysis.hpp"
#include "infoplane/config_io.hpp"
#include "infoplane/csv_io.hpp"
#include "infoplane/dataset.hpp"
#include "infoplane/errors.hpp"
#include "infoplane/estimators.hpp"
#include "infoplane/network.hpp"
#include "infoplane/svg.hpp"
#include "infoplane/sweep.hpp"
#include "infoplane/trace.hpp"

namespace fs = std::filesystem;

namespace infoplane::cli {

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitArgument = 2;

struct EstimatorFlags {
  std::string estimator = "ebab";
  std::size_t bins = 30;
  double sigma0_sq = 1e-3;
  std::string scaling = "quadratic";
  std::optional<double> range_lo;
  std::optional<double> range_hi;

  void attach(CLI::App& app) {
    app.add_option("--estimator", estimator, "uniform | ebab | kde-fixed | kde-adaptive")
        ->check(CLI::IsMember({"uniform", "ebab", "kde-fixed", "kde-adaptive"}));
    app.add_option("--bins", bins, "Number of bins for binning estimators")->check(CLI::Range(2, 1 << 20));
    app.add_option("--sigma0-sq", sigma0_sq, "Reference noise variance (adaptive) or noise variance (fixed)")
        ->check(CLI::PositiveNumber);
    app.add_option("--scaling", scaling, "Adaptive noise scaling")->check(CLI::IsMember({"quadratic", "literal"}));
    app.add_option("--range-lo", range_lo, "Uniform binning lower edge (default min(0, trace min))");
    app.add_option("--range-hi", range_hi, "Uniform binning upper edge (default trace max)");
  }

  EstimatorSpec spec() const {
    EstimatorSpec s;
    s.kind = parse_estimator(estimator);
    s.n_bins = bins;
    s.sigma0_sq = sigma0_sq;
    s.scaling = scaling == "literal" ? KdeScaling::literal : KdeScaling::quadratic;
    s.range_lo = range_lo;
    s.range_hi = range_hi;
    return s;
  }
};

struct DataFlags {
  std::string data;
  std::uint64_t data_seed = 0;
  double split_fraction = 0.8;
  std::uint64_t split_seed = 0;

  void attach(CLI::App& app) {
    app.add_option("--data", data, "Dataset CSV (default: generated from --data-seed)");
    app.add_option("--data-seed", data_seed, "Seed for the generated dataset");
    app.add_option("--split-fraction", split_fraction, "Training fraction");
    app.add_option("--split-seed", split_seed, "Seed for the stratified split");
  }

  Dataset dataset() const { return data.empty() ? generate_dataset(data_seed) : load_dataset(data); }
};

InfoPlane plane_for_run(const std::vector<MIEstimate>& estimates) { return plane_from_estimates(estimates); }

// Groups estimate rows by run id, preserving first-seen order.
std::vector<std::pair<std::string, std::vector<MIEstimate>>> group_by_run(std::vector<EstimateRow> rows) {
  std::vector<std::pair<std::string, std::vector<MIEstimate>>> out;
  std::map<std::string, std::size_t> index;
  for (auto& r : rows) {
    auto [it, inserted] = index.try_emplace(r.run_id, out.size());
    if (inserted) out.push_back({r.run_id, {}});
    out[it->second].second.push_back(std::move(r.estimate));
  }
  return out;
}

nlohmann::json correlation_or_reason(std::span<const double> x, std::span<const double> y) {
  try {
    const auto c = correlate(x, y);
    return {{"pearson_r", c.pearson_r}, {"spearman_rho", c.spearman_rho}, {"n", c.n}};
  } catch (const ArgumentError& e) {
    return {{"undefined", e.what()}, {"n", x.size()}};
  }
}

int cmd_generate(std::uint64_t seed, const std::string& out) {
  const auto ds = generate_dataset(seed);
  save_dataset(ds, out);
  const auto counts = ds.class_counts();
  std::cout << "wrote " << ds.size() << " samples (" << counts[0] << " / " << counts[1] << ") to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const DataFlags& data, const std::string& out) {
  const NetworkConfig config = load_config(config_path);
  const Dataset ds = data.dataset();
  if (!ds.balanced()) {
    const auto c = ds.class_counts();
    std::cerr << "warning: dataset is not balanced (" << c[0] << " / " << c[1] << ")\n";
  }
  const Split split = make_split(ds, data.split_fraction, data.split_seed);
  const auto result = train(config, ds, split);
  write_trace(result.trace, out);
  if (!result.metrics.epochs.empty()) {
    const auto& m = result.metrics.epochs.back();
    std::cout << "epoch " << m.epoch << ": loss " << m.train_loss << ", train accuracy " << m.train_accuracy
              << ", test accuracy " << m.test_accuracy << "\n";
  }
  std::cout << "trace with " << result.trace.snapshots.size() << " snapshots written to " << out << "\n";
  return 0;
}

int cmd_estimate(const std::string& trace_dir, const EstimatorFlags& flags, const std::string& out, std::string run_id) {
  const auto trace = read_trace(trace_dir);
  if (run_id.empty()) run_id = fs::path(trace_dir).lexically_normal().filename().string();
  if (run_id.empty()) run_id = "run";
  const auto estimates = estimate_trace(trace, flags.spec());
  std::size_t violations = 0;
  for (const auto& e : estimates) violations += e.range_violations;
  write_text_file(out, format_estimates(run_id, estimates));
  if (violations) std::cerr << "warning: " << violations << " activation values fell outside the binning range\n";
  std::cout << estimates.size() << " estimates written to " << out << "\n";
  return 0;
}

int cmd_score(const std::vector<std::string>& estimate_files, const std::vector<std::string>& traces,
              const std::string& out, const std::string& json_out, bool include_last) {
  if (!traces.empty() && traces.size() != estimate_files.size())
    throw ArgumentError("--trace must be given once per --estimates file, or not at all");

  std::vector<ScoreRow> rows;
  std::vector<InfoPlane> planes;
  std::vector<double> net, last, accs;
  for (std::size_t f = 0; f < estimate_files.size(); ++f) {
    double accuracy = 0.0;
    bool have_accuracy = false;
    if (!traces.empty()) {
      const auto manifest = read_manifest(traces[f]);
      if (!manifest.metrics.empty()) {
        accuracy = manifest.metrics.back().test_accuracy;
        have_accuracy = true;
      }
    }
    for (auto& [run_id, estimates] : group_by_run(read_estimates(estimate_files[f]))) {
      planes.push_back(plane_for_run(estimates));
      const auto& plane = planes.back();
      auto subset = hidden_rows(plane);
      if (include_last || subset.empty()) {
        subset.resize(plane.layer_count());
        std::iota(subset.begin(), subset.end(), std::size_t{0});
      }
      const auto report = compression_score(plane, subset);
      for (std::size_t k = 0; k < report.per_layer_scores.size(); ++k)
        rows.push_back({run_id, std::to_string(plane.layers[k]), report.per_layer_scores[k], accuracy});
      rows.push_back({run_id, "network", report.network_score, accuracy});
      rows.push_back({run_id, "last", report.last_layer_score, accuracy});
      if (have_accuracy) {
        net.push_back(report.network_score);
        last.push_back(report.last_layer_score);
        accs.push_back(accuracy);
      }
    }
  }
  nlohmann::json summary{{"accuracy_metric", "final-epoch test accuracy"}, {"runs", planes.size()}};
  if (planes.size() > 1) {
    const auto mean = average_planes(planes);
    const auto report = compression_score(mean, hidden_rows(mean));
    rows.push_back({"mean", "network", report.network_score, 0.0});
    summary["averaged_network_score"] = report.network_score;
    summary["averaged_last_layer_score"] = report.last_layer_score;
  }
  summary["network_score_vs_accuracy"] = correlation_or_reason(net, accs);
  summary["last_layer_score_vs_accuracy"] = correlation_or_reason(last, accs);
  write_text_file(out, format_scores(rows));
  if (!json_out.empty()) write_text_file(json_out, summary.dump(2) + "\n");
  std::cout << rows.size() << " score rows written to " << out << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, std::size_t workers, const std::string& seeds,
              const EstimatorFlags& flags, bool estimator_given) {
  std::ifstream in(config_path);
  if (!in) throw ArgumentError("cannot open sweep config " + config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(config_path + ": " + e.what());
  }
  SweepSpec spec = sweep_spec_from_json(j);
  if (!seeds.empty()) spec.seeds = parse_seed_range(seeds);
  if (estimator_given) spec.estimators = {flags.spec()};
  SweepOptions options;
  options.workers = workers;
  const auto report = run_sweep(spec, out, options);
  std::size_t trained = 0, skipped = 0;
  for (const auto& r : report.runs) {
    if (r.status == RunStatus::trained) ++trained;
    if (r.status == RunStatus::skipped) ++skipped;
    if (r.status == RunStatus::failed) std::cerr << "run " << r.key.id() << " failed: " << r.error << "\n";
  }
  std::cout << "sweep: " << trained << " trained, " << skipped << " skipped, " << report.failures() << " failed\n";
  for (const auto& g : report.groups) {
    if (g.runs == 0) continue;
    std::cout << describe(g.activation) << " l2=" << g.l2_lambda << " " << g.estimator << ": score "
              << g.averaged_score.network_score << " (last layer " << g.averaged_score.last_layer_score
              << "), mean accuracy " << g.mean_accuracy << " over " << g.runs << " runs\n";
  }
  return report.failures() ? kExitRunFailure : 0;
}

int cmd_plot(const std::string& estimates, const std::string& out, std::string title) {
  std::vector<InfoPlane> planes;
  std::string estimator;
  for (auto& [run_id, rows] : group_by_run(read_estimates(estimates))) {
    if (estimator.empty() && !rows.empty()) estimator = rows.front().estimator;
    planes.push_back(plane_for_run(rows));
  }
  if (planes.empty()) throw ArgumentError(estimates + " holds no estimates");
  const auto plane = planes.size() == 1 ? planes.front() : average_planes(planes);
  PlotStyle style;
  style.title = title.empty() ? fs::path(estimates).stem().string() + " (" + estimator + ")" : std::move(title);
  write_text_file(out, render_information_plane(plane, style));
  std::cout << "plot of " << plane.layer_count() << " layers x " << plane.epoch_count() << " epochs written to "
            << out << "\n";
  return 0;
}

int cmd_maxvals(const std::string& trace_dir, const std::string& out) {
  const auto report = max_activation_report(read_trace(trace_dir));
  write_text_file(out, format_max_activations(report));
  std::cout << report.epochs.size() << " epochs written to " << out << "\n";
  return 0;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto number = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s.front() == '-') throw ArgumentError("bad seed \"" + s + "\" in \"" + text + "\"");
    return v;
  };
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (hi < lo) throw ArgumentError("empty seed range \"" + text + "\"");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    seeds.push_back(number(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

int run(int argc, char** argv) {
  CLI::App app{"Information-plane experiments: training, mutual information estimation, compression scores"};
  app.require_subcommand(1);

  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate-data", "Write the 12-bit dataset as CSV");
  gen->add_option("--seed", gen_seed, "Label seed");
  gen->add_option("--out", gen_out, "Output CSV")->required();

  std::string train_config, train_out;
  DataFlags train_data;
  auto* train_cmd = app.add_subcommand("train", "Train one network and record its activation trace");
  train_cmd->add_option("--config", train_config, "Network config JSON")->required();
  train_cmd->add_option("--out", train_out, "Trace directory (must be empty or absent)")->required();
  train_data.attach(*train_cmd);

  std::string est_trace, est_out, est_run_id;
  EstimatorFlags est_flags;
  auto* est = app.add_subcommand("estimate", "Estimate I(T;X), I(T;Y) for every layer and snapshot of a trace");
  est->add_option("--trace", est_trace, "Trace directory")->required();
  est->add_option("--out", est_out, "Estimates CSV")->required();
  est->add_option("--run-id", est_run_id, "Run id column (default: trace directory name)");
  est_flags.attach(*est);

  std::vector<std::string> score_estimates, score_traces;
  std::string score_out, score_json;
  bool score_all_layers = false;
  auto* score = app.add_subcommand("score", "Compression scores and score/accuracy correlations");
  score->add_option("--estimates", score_estimates, "Estimates CSV (repeatable)")->required();
  score->add_option("--trace", score_traces, "Trace directory paired with each --estimates, for accuracies");
  score->add_option("--out", score_out, "Scores CSV")->required();
  score->add_option("--json", score_json, "Correlation summary JSON");
  score->add_flag("--include-last", score_all_layers, "Average the softmax layer into the network score");

  std::string sweep_config, sweep_out, sweep_seeds;
  std::size_t sweep_workers = 1;
  EstimatorFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Train and analyse every (activation, l2, seed) of a sweep spec");
  sweep->add_option("--config", sweep_config, "Sweep spec JSON")->required();
  sweep->add_option("--out", sweep_out, "Sweep output directory")->required();
  sweep->add_option("--workers", sweep_workers, "Concurrent runs")->check(CLI::Range(1, 1024));
  sweep->add_option("--seeds", sweep_seeds, "Seed list: a..b, a,b,c or a single seed");
  sweep_flags.attach(*sweep);

  std::string plot_estimates, plot_out, plot_title;
  auto* plot = app.add_subcommand("plot", "Render an information plane as SVG (runs in one file are averaged)");
  plot->add_option("--estimates", plot_estimates, "Estimates CSV")->required();
  plot->add_option("--out", plot_out, "Output SVG")->required();
  plot->add_option("--title", plot_title, "Plot title");

  std::string max_trace, max_out;
  auto* maxvals = app.add_subcommand("maxvals", "Per-epoch maximum |activation| per layer and network-wide");
  maxvals->add_option("--trace", max_trace, "Trace directory")->required();
  maxvals->add_option("--out", max_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgument;
  }

  try {
    if (*gen) return cmd_generate(gen_seed, gen_out);
    if (*train_cmd) return cmd_train(train_config, train_data, train_out);
    if (*est) return cmd_estimate(est_trace, est_flags, est_out, est_run_id);
    if (*score) return cmd_score(score_estimates, score_traces, score_out, score_json, score_all_layers);
    if (*sweep) {
      const bool estimator_given = sweep->count("--estimator") > 0;
      return cmd_sweep(sweep_config, sweep_out, sweep_workers, sweep_seeds, sweep_flags, estimator_given);
    }
    if (*plot) return cmd_plot(plot_estimates, plot_out, plot_title);
    if (*maxvals) return cmd_maxvals(max_trace, max_out);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitArgument;
}

}  // namespace infoplane::cli
