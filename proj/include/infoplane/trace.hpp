#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "infoplane/matrix.hpp"

namespace infoplane {

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // cross-entropy only, nats per sample
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct TraceManifest {
  std::vector<std::size_t> layer_sizes;  // units of each recorded layer
  std::vector<std::size_t> epochs;       // strictly increasing
  nlohmann::json config;                 // echo of the training config
  std::uint64_t dataset_fingerprint = 0;
  std::vector<std::uint8_t> labels;      // label of every recorded sample, in row order
  std::vector<EpochMetrics> metrics;     // one entry per snapshot epoch (may be empty)
};

struct Snapshot {
  std::size_t epoch = 0;
  std::vector<Matrix> layers;  // samples x units, one per recorded layer
};

struct ActivationTrace {
  TraceManifest manifest;
  std::vector<Snapshot> snapshots;

  std::size_t samples() const noexcept { return manifest.labels.size(); }
  /// Throws FormatError if snapshots disagree with the manifest.
  void validate() const;
};

inline constexpr char kTraceMagic[8] = {'I', 'P', 'T', 'R', 'A', 'C', 'E', '1'};
inline constexpr std::size_t kSnapshotHeaderBytes = sizeof(kTraceMagic);
inline constexpr std::size_t kLayerHeaderBytes = 12;

std::filesystem::path snapshot_path(const std::filesystem::path& directory, std::size_t epoch);
std::uintmax_t expected_snapshot_size(const Snapshot& snapshot);

/// Writes manifest.json and one epoch_<E>.act per snapshot. Each file goes
/// through a temporary name and a rename; the manifest is written last.
/// Refuses a directory that already has entries.
void write_trace(const ActivationTrace& trace, const std::filesystem::path& directory);

ActivationTrace read_trace(const std::filesystem::path& directory);
TraceManifest read_manifest(const std::filesystem::path& directory);

/// True when the directory holds a parseable manifest and every snapshot
/// file it lists.
bool trace_complete(const std::filesystem::path& directory);

/// Bitwise comparison, so NaN payloads and signed zeros count.
bool bitwise_equal(const ActivationTrace& a, const ActivationTrace& b);

}  // namespace infoplane
