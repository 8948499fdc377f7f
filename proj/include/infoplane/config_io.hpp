#pragma once

#include <filesystem>

#include <json.hpp>

#include "infoplane/network.hpp"

namespace infoplane {

// NetworkConfig <-> JSON. Keys mirror the struct fields; missing keys take
// the struct defaults (snapshot_epochs defaults to the log-spaced schedule
// for the given epoch count). Unknown keys throw ArgumentError.

nlohmann::json activation_to_json(const ActivationKind& kind);
ActivationKind activation_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const NetworkConfig& config);
NetworkConfig config_from_json(const nlohmann::json& j);
NetworkConfig load_config(const std::filesystem::path& path);

}  // namespace infoplane
