#include "infoplane/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "infoplane/config_io.hpp"
#include "infoplane/csv_io.hpp"
#include "infoplane/dataset.hpp"
#include "infoplane/errors.hpp"
#include "infoplane/svg.hpp"
#include "infoplane/trace.hpp"

namespace fs = std::filesystem;

namespace infoplane {

namespace {

const std::set<std::string> kSweepKeys{"activations", "seeds",       "l2_lambdas", "base",          "estimators",
                                       "data_seed",   "data_path",   "split_fraction", "split_seed"};
const std::set<std::string> kEstimatorKeys{"kind", "bins", "sigma0_sq", "scaling", "range_lo", "range_hi"};

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string activation_id(const ActivationKind& kind) {
  std::string id = activation_name(kind.tag);
  if (kind.has_param()) id += "-" + short_real(kind.param);
  return id;
}

fs::path run_dir(const fs::path& out, const RunKey& key) { return out / "runs" / key.id(); }

fs::path estimates_path(const fs::path& dir, const EstimatorSpec& est) {
  return dir / ("estimates_" + estimator_name(est.kind) + ".csv");
}

std::vector<MIEstimate> load_estimates(const fs::path& path) {
  std::vector<MIEstimate> out;
  for (auto& row : read_estimates(path)) out.push_back(std::move(row.estimate));
  return out;
}

nlohmann::json correlation_json(const std::optional<Correlation>& c) {
  if (!c) return nullptr;
  return {{"pearson_r", c->pearson_r}, {"spearman_rho", c->spearman_rho}, {"n", c->n}};
}

std::optional<Correlation> try_correlate(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return correlate(x, y);
  } catch (const ArgumentError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<std::uint64_t> SweepSpec::default_seeds() {
  std::vector<std::uint64_t> seeds(50);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  return seeds;
}

void SweepSpec::validate() const {
  if (activations.empty()) throw ArgumentError("sweep needs at least one activation");
  if (seeds.empty()) throw ArgumentError("sweep needs at least one seed");
  if (l2_lambdas.empty()) throw ArgumentError("sweep needs at least one l2 lambda");
  if (estimators.empty()) throw ArgumentError("sweep needs at least one estimator");
  for (double l : l2_lambdas)
    if (!(l >= 0.0)) throw ArgumentError("l2 lambdas must be nonnegative");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ArgumentError("split_fraction must lie in (0, 1)");
  base.validate();
}

nlohmann::json estimator_spec_to_json(const EstimatorSpec& spec) {
  nlohmann::json j{{"kind", estimator_name(spec.kind)},
                   {"bins", spec.n_bins},
                   {"sigma0_sq", spec.sigma0_sq},
                   {"scaling", spec.scaling == KdeScaling::quadratic ? "quadratic" : "literal"}};
  if (spec.range_lo) j["range_lo"] = *spec.range_lo;
  if (spec.range_hi) j["range_hi"] = *spec.range_hi;
  return j;
}

EstimatorSpec estimator_spec_from_json(const nlohmann::json& j) {
  EstimatorSpec spec;
  if (j.is_string()) {
    spec.kind = parse_estimator(j.get<std::string>());
    return spec;
  }
  if (!j.is_object()) throw ArgumentError("estimator must be a name or an object");
  for (const auto& [key, value] : j.items())
    if (!kEstimatorKeys.contains(key)) throw ArgumentError("unknown estimator key \"" + key + "\"");
  try {
    spec.kind = parse_estimator(j.at("kind").get<std::string>());
    if (j.contains("bins")) spec.n_bins = j.at("bins").get<std::size_t>();
    if (j.contains("sigma0_sq")) spec.sigma0_sq = j.at("sigma0_sq").get<double>();
    if (j.contains("scaling")) {
      const auto s = j.at("scaling").get<std::string>();
      if (s == "quadratic") spec.scaling = KdeScaling::quadratic;
      else if (s == "literal") spec.scaling = KdeScaling::literal;
      else throw ArgumentError("scaling must be quadratic or literal");
    }
    if (j.contains("range_lo")) spec.range_lo = j.at("range_lo").get<double>();
    if (j.contains("range_hi")) spec.range_hi = j.at("range_hi").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("estimator spec: ") + e.what());
  }
  if (spec.n_bins < 2) throw ArgumentError("bins must be at least 2");
  if (!(spec.sigma0_sq > 0.0)) throw ArgumentError("sigma0_sq must be positive");
  return spec;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("sweep spec must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kSweepKeys.contains(key)) throw ArgumentError("unknown sweep key \"" + key + "\"");
  SweepSpec spec;
  try {
    if (j.contains("base")) spec.base = config_from_json(j.at("base"));
    if (j.contains("activations")) {
      spec.activations.clear();
      for (const auto& a : j.at("activations")) spec.activations.push_back(activation_from_json(a));
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("l2_lambdas")) spec.l2_lambdas = j.at("l2_lambdas").get<std::vector<double>>();
    if (j.contains("estimators")) {
      spec.estimators.clear();
      for (const auto& e : j.at("estimators")) spec.estimators.push_back(estimator_spec_from_json(e));
    }
    if (j.contains("data_seed")) spec.data_seed = j.at("data_seed").get<std::uint64_t>();
    if (j.contains("data_path")) spec.data_path = j.at("data_path").get<std::string>();
    if (j.contains("split_fraction")) spec.split_fraction = j.at("split_fraction").get<double>();
    if (j.contains("split_seed")) spec.split_seed = j.at("split_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json sweep_spec_to_json(const SweepSpec& spec) {
  nlohmann::json j;
  j["activations"] = nlohmann::json::array();
  for (const auto& a : spec.activations) j["activations"].push_back(activation_to_json(a));
  j["seeds"] = spec.seeds;
  j["l2_lambdas"] = spec.l2_lambdas;
  j["base"] = config_to_json(spec.base);
  j["estimators"] = nlohmann::json::array();
  for (const auto& e : spec.estimators) j["estimators"].push_back(estimator_spec_to_json(e));
  j["data_seed"] = spec.data_seed;
  if (spec.data_path) j["data_path"] = spec.data_path->string();
  j["split_fraction"] = spec.split_fraction;
  j["split_seed"] = spec.split_seed;
  return j;
}

std::string RunKey::id() const { return group_id() + "_seed-" + std::to_string(seed); }

std::string RunKey::group_id() const { return activation_id(activation) + "_l2-" + short_real(l2_lambda); }

std::size_t SweepReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.status == RunStatus::failed; }));
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json j;
  j["accuracy_metric"] = "final-epoch test accuracy";
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    const char* status = r.status == RunStatus::trained ? "trained" : r.status == RunStatus::skipped ? "skipped" : "failed";
    nlohmann::json e{{"id", r.key.id()},
                     {"activation", activation_to_json(r.key.activation)},
                     {"l2_lambda", r.key.l2_lambda},
                     {"seed", r.key.seed},
                     {"status", status}};
    if (r.status == RunStatus::failed) e["error"] = r.error;
    else {
      e["final_train_accuracy"] = r.final_train_accuracy;
      e["final_test_accuracy"] = r.final_test_accuracy;
    }
    j["runs"].push_back(e);
  }
  j["groups"] = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json e{{"activation", activation_to_json(g.activation)},
                     {"l2_lambda", g.l2_lambda},
                     {"estimator", g.estimator},
                     {"runs", g.runs},
                     {"mean_accuracy", g.mean_accuracy},
                     {"averaged_network_score", g.averaged_score.network_score},
                     {"averaged_last_layer_score", g.averaged_score.last_layer_score},
                     {"averaged_layer_scores", g.averaged_score.per_layer_scores},
                     {"network_score_vs_accuracy", correlation_json(g.network_vs_accuracy)},
                     {"last_layer_score_vs_accuracy", correlation_json(g.last_layer_vs_accuracy)}};
    e["run_scores"] = nlohmann::json::array();
    for (const auto& s : g.run_scores) {
      e["run_scores"].push_back({{"run_id", s.run_id},
                                 {"network_score", s.network_score},
                                 {"last_layer_score", s.last_layer_score},
                                 {"accuracy", s.accuracy}});
    }
    j["groups"].push_back(e);
  }

  // Averaged score against mean accuracy across activations, per (lambda, estimator).
  std::map<std::pair<double, std::string>, std::pair<std::vector<double>, std::vector<double>>> across;
  for (const auto& g : groups) {
    if (g.runs == 0) continue;
    auto& [scores, accs] = across[{g.l2_lambda, g.estimator}];
    scores.push_back(g.averaged_score.network_score);
    accs.push_back(g.mean_accuracy);
  }
  j["across_activations"] = nlohmann::json::array();
  for (const auto& [key, values] : across) {
    j["across_activations"].push_back({{"l2_lambda", key.first},
                                       {"estimator", key.second},
                                       {"points", values.first.size()},
                                       {"score_vs_accuracy", correlation_json(try_correlate(values.first, values.second))}});
  }
  return j;
}

std::vector<RunKey> enumerate_runs(const SweepSpec& spec) {
  std::vector<RunKey> keys;
  for (const auto& a : spec.activations)
    for (double l : spec.l2_lambdas)
      for (auto s : spec.seeds) keys.push_back({a, l, s});
  return keys;
}

SweepReport run_sweep(const SweepSpec& spec, const fs::path& out_dir, const SweepOptions& options) {
  spec.validate();
  const Dataset dataset = spec.data_path ? load_dataset(*spec.data_path) : generate_dataset(spec.data_seed);
  const Split split = make_split(dataset, spec.split_fraction, spec.split_seed);
  fs::create_directories(out_dir / "runs");

  const auto keys = enumerate_runs(spec);
  SweepReport report;
  report.runs.resize(keys.size());

  auto execute = [&](std::size_t index) {
    const RunKey& key = keys[index];
    RunOutcome& outcome = report.runs[index];
    outcome.key = key;
    const fs::path dir = run_dir(out_dir, key);
    const fs::path trace_dir = dir / "trace";
    try {
      std::optional<ActivationTrace> trace;
      if (trace_complete(trace_dir)) {
        outcome.status = RunStatus::skipped;
      } else {
        if (options.before_train) options.before_train(key);
        fs::remove_all(trace_dir);
        NetworkConfig config = spec.base;
        config.activation = key.activation;
        config.l2_lambda = key.l2_lambda;
        config.seed = key.seed;
        auto result = train(config, dataset, split);
        write_trace(result.trace, trace_dir);
        for (const auto& est : spec.estimators) fs::remove(estimates_path(dir, est));
        trace = std::move(result.trace);
        outcome.status = RunStatus::trained;
      }
      const auto manifest = read_manifest(trace_dir);
      if (!manifest.metrics.empty()) {
        outcome.final_train_accuracy = manifest.metrics.back().train_accuracy;
        outcome.final_test_accuracy = manifest.metrics.back().test_accuracy;
      }
      for (const auto& est : spec.estimators) {
        const auto path = estimates_path(dir, est);
        if (fs::exists(path)) continue;
        if (!trace) trace = read_trace(trace_dir);
        const auto estimates = estimate_trace(*trace, est);
        write_text_file(path, format_estimates(key.id(), estimates));
      }
    } catch (const std::exception& e) {
      outcome.status = RunStatus::failed;
      outcome.error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, keys.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < keys.size(); i = next++) execute(i);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Collector: one group per (activation, lambda, estimator), in spec order.
  for (const auto& activation : spec.activations) {
    for (double lambda : spec.l2_lambdas) {
      for (const auto& est : spec.estimators) {
        GroupReport group;
        group.activation = activation;
        group.l2_lambda = lambda;
        group.estimator = estimator_name(est.kind);
        std::vector<InfoPlane> planes;
        std::vector<double> net_scores, last_scores, accs;
        std::string group_id;
        for (const auto& run : report.runs) {
          if (run.status == RunStatus::failed || !(run.key.activation == activation) || run.key.l2_lambda != lambda)
            continue;
          group_id = run.key.group_id();
          const auto estimates = load_estimates(estimates_path(run_dir(out_dir, run.key), est));
          planes.push_back(plane_from_estimates(estimates));
          const auto score = compression_score(planes.back(), hidden_rows(planes.back()));
          group.run_scores.push_back({run.key.id(), score.network_score, score.last_layer_score, run.final_test_accuracy});
          net_scores.push_back(score.network_score);
          last_scores.push_back(score.last_layer_score);
          accs.push_back(run.final_test_accuracy);
        }
        group.runs = planes.size();
        if (!planes.empty()) {
          group.averaged = average_planes(planes);
          group.averaged_score = compression_score(group.averaged, hidden_rows(group.averaged));
          group.mean_accuracy = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
          group.network_vs_accuracy = try_correlate(net_scores, accs);
          group.last_layer_vs_accuracy = try_correlate(last_scores, accs);

          const fs::path gdir = out_dir / "groups" / group_id;
          const auto name = estimator_name(est.kind);
          write_text_file(gdir / ("plane_" + name + ".csv"), format_plane("mean", name, group.averaged));
          PlotStyle style;
          style.title = group_id + " (" + name + ", mean of " + std::to_string(planes.size()) + ")";
          write_text_file(gdir / ("plane_" + name + ".svg"), render_information_plane(group.averaged, style));
          std::vector<ScoreRow> rows;
          for (const auto& s : group.run_scores) {
            rows.push_back({s.run_id, "network", s.network_score, s.accuracy});
            rows.push_back({s.run_id, "last", s.last_layer_score, s.accuracy});
          }
          for (std::size_t k = 0; k < group.averaged_score.per_layer_scores.size(); ++k)
            rows.push_back({"mean", std::to_string(k), group.averaged_score.per_layer_scores[k], group.mean_accuracy});
          rows.push_back({"mean", "network", group.averaged_score.network_score, group.mean_accuracy});
          write_text_file(gdir / ("scores_" + name + ".csv"), format_scores(rows));
        }
        report.groups.push_back(std::move(group));
      }
    }
  }

  nlohmann::json j = report.to_json();
  j["spec"] = sweep_spec_to_json(spec);
  write_text_file(out_dir / "sweep_report.json", j.dump(2) + "\n");
  return report;
}

}  // namespace infoplane
