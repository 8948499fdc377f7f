#include "infoplane/config_io.hpp"

#include <fstream>
#include <set>

#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

const std::set<std::string> kConfigKeys{"layer_sizes", "activation",      "l2_lambda", "learning_rate",   "batch_size",
                                        "epochs",      "seed",            "snapshot_epochs", "snapshot_samples"};

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config field \"") + key + "\": " + e.what());
  }
}

}  // namespace

nlohmann::json activation_to_json(const ActivationKind& kind) {
  if (!kind.has_param()) return activation_name(kind.tag);
  return {{"kind", activation_name(kind.tag)}, {"param", kind.param}};
}

ActivationKind activation_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto tag = parse_activation_tag(j.get<std::string>());
    switch (tag) {
      case ActivationTag::prelu: return ActivationKind::prelu();
      case ActivationTag::elu: return ActivationKind::elu();
      case ActivationTag::swish: return ActivationKind::swish();
      default: return {tag, 0.0};
    }
  }
  if (!j.is_object()) throw ArgumentError("activation must be a name or {\"kind\", \"param\"}");
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "param") throw ArgumentError("unknown activation key \"" + key + "\"");
  }
  auto kind = activation_from_json(j.at("kind"));
  if (j.contains("param")) {
    if (!kind.has_param()) throw ArgumentError(activation_name(kind.tag) + " takes no parameter");
    kind.param = field<double>(j, "param");
  }
  return kind;
}

nlohmann::json config_to_json(const NetworkConfig& c) {
  return {{"layer_sizes", c.layer_sizes},
          {"activation", activation_to_json(c.activation)},
          {"l2_lambda", c.l2_lambda},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"snapshot_epochs", c.snapshot_epochs},
          {"snapshot_samples", c.snapshot_samples == SnapshotSamples::full ? "full" : "train"}};
}

NetworkConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.contains(key)) throw ArgumentError("unknown config key \"" + key + "\"");
  }
  NetworkConfig c;
  if (j.contains("layer_sizes")) c.layer_sizes = field<std::vector<std::size_t>>(j, "layer_sizes");
  if (j.contains("activation")) c.activation = activation_from_json(j.at("activation"));
  if (j.contains("l2_lambda")) c.l2_lambda = field<double>(j, "l2_lambda");
  if (j.contains("learning_rate")) c.learning_rate = field<double>(j, "learning_rate");
  if (j.contains("batch_size")) c.batch_size = field<std::size_t>(j, "batch_size");
  if (j.contains("epochs")) c.epochs = field<std::size_t>(j, "epochs");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  c.snapshot_epochs = j.contains("snapshot_epochs") ? field<std::vector<std::size_t>>(j, "snapshot_epochs")
                                                    : NetworkConfig::default_snapshot_epochs(c.epochs);
  if (j.contains("snapshot_samples")) {
    const auto s = field<std::string>(j, "snapshot_samples");
    if (s == "full") c.snapshot_samples = SnapshotSamples::full;
    else if (s == "train") c.snapshot_samples = SnapshotSamples::train;
    else throw ArgumentError("snapshot_samples must be \"full\" or \"train\"");
  }
  c.validate();
  return c;
}

NetworkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
}

}  // namespace infoplane
