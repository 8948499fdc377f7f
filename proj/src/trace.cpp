#include "infoplane/trace.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "infoplane/errors.hpp"

namespace fs = std::filesystem;

namespace infoplane {

namespace {

constexpr const char* kManifestName = "manifest.json";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFU));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return std::bit_cast<double>(v);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFULL) throw FormatError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

void atomic_write(const fs::path& target, const std::string& bytes) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string encode_snapshot(const Snapshot& snapshot) {
  std::string out;
  out.reserve(expected_snapshot_size(snapshot));
  out.append(kTraceMagic, sizeof(kTraceMagic));
  for (std::size_t l = 0; l < snapshot.layers.size(); ++l) {
    const Matrix& m = snapshot.layers[l];
    put_u32(out, checked_u32(l, "layer index"));
    put_u32(out, checked_u32(m.rows(), "row count"));
    put_u32(out, checked_u32(m.cols(), "column count"));
    for (double v : m.values()) put_f64(out, v);
  }
  return out;
}

Snapshot decode_snapshot(const std::string& bytes, const fs::path& path, std::size_t epoch,
                         const TraceManifest& manifest) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  auto fail = [&](const std::string& what, std::size_t offset) -> FormatError {
    return FormatError(path.string() + " at offset " + std::to_string(offset) + ": " + what);
  };

  if (size < kSnapshotHeaderBytes) throw fail("truncated magic", size);
  if (std::memcmp(data, kTraceMagic, sizeof(kTraceMagic)) != 0) throw fail("bad magic", 0);

  Snapshot snap;
  snap.epoch = epoch;
  const std::size_t samples = manifest.labels.size();
  std::size_t offset = kSnapshotHeaderBytes;
  for (std::size_t l = 0; l < manifest.layer_sizes.size(); ++l) {
    if (size - offset < kLayerHeaderBytes) throw fail("truncated layer header", offset);
    const auto index = get_u32(data + offset);
    const auto rows = get_u32(data + offset + 4);
    const auto cols = get_u32(data + offset + 8);
    if (index != l) throw fail("expected layer " + std::to_string(l) + ", found " + std::to_string(index), offset);
    if (rows != samples || cols != manifest.layer_sizes[l]) {
      throw fail("layer " + std::to_string(l) + " is " + std::to_string(rows) + "x" + std::to_string(cols) +
                     ", manifest says " + std::to_string(samples) + "x" +
                     std::to_string(manifest.layer_sizes[l]),
                 offset);
    }
    offset += kLayerHeaderBytes;
    const std::size_t count = std::size_t{rows} * cols;
    if ((size - offset) / 8 < count) throw fail("truncated layer payload", offset);
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = get_f64(data + offset + 8 * i);
    offset += 8 * count;
    snap.layers.emplace_back(rows, cols, std::move(values));
  }
  if (offset != size) throw fail("trailing bytes", offset);
  return snap;
}

nlohmann::json manifest_to_json(const TraceManifest& m) {
  nlohmann::json j;
  j["format"] = "IPTRACE1";
  j["layer_sizes"] = m.layer_sizes;
  j["epochs"] = m.epochs;
  j["config"] = m.config;
  char fp[19];
  std::snprintf(fp, sizeof(fp), "0x%016llx", static_cast<unsigned long long>(m.dataset_fingerprint));
  j["dataset_fingerprint"] = fp;
  std::string labels;
  labels.reserve(m.labels.size());
  for (auto y : m.labels) labels.push_back(y ? '1' : '0');
  j["labels"] = labels;
  auto metrics = nlohmann::json::array();
  for (const auto& e : m.metrics) {
    metrics.push_back({{"epoch", e.epoch},
                       {"train_loss", e.train_loss},
                       {"train_accuracy", e.train_accuracy},
                       {"test_accuracy", e.test_accuracy}});
  }
  j["metrics"] = metrics;
  return j;
}

TraceManifest manifest_from_json(const nlohmann::json& j, const fs::path& path) {
  try {
    if (j.at("format").get<std::string>() != "IPTRACE1") throw FormatError(path.string() + ": unknown format tag");
    TraceManifest m;
    m.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    m.epochs = j.at("epochs").get<std::vector<std::size_t>>();
    m.config = j.at("config");
    m.dataset_fingerprint = std::stoull(j.at("dataset_fingerprint").get<std::string>(), nullptr, 16);
    for (char c : j.at("labels").get<std::string>()) {
      if (c != '0' && c != '1') throw FormatError(path.string() + ": labels must be 0/1 characters");
      m.labels.push_back(c == '1' ? 1 : 0);
    }
    for (const auto& e : j.at("metrics")) {
      m.metrics.push_back({e.at("epoch").get<std::size_t>(), e.at("train_loss").get<double>(),
                           e.at("train_accuracy").get<double>(), e.at("test_accuracy").get<double>()});
    }
    for (std::size_t i = 1; i < m.epochs.size(); ++i) {
      if (m.epochs[i] <= m.epochs[i - 1]) throw FormatError(path.string() + ": epochs not strictly increasing");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void ActivationTrace::validate() const {
  const auto& m = manifest;
  if (snapshots.size() != m.epochs.size()) {
    throw FormatError("trace has " + std::to_string(snapshots.size()) + " snapshots for " +
                      std::to_string(m.epochs.size()) + " manifest epochs");
  }
  for (std::size_t i = 1; i < m.epochs.size(); ++i) {
    if (m.epochs[i] <= m.epochs[i - 1]) throw FormatError("manifest epochs not strictly increasing");
  }
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const auto& snap = snapshots[s];
    if (snap.epoch != m.epochs[s]) {
      throw FormatError("snapshot " + std::to_string(s) + " has epoch " + std::to_string(snap.epoch) +
                        ", manifest says " + std::to_string(m.epochs[s]));
    }
    if (snap.layers.size() != m.layer_sizes.size()) {
      throw FormatError("snapshot at epoch " + std::to_string(snap.epoch) + " has wrong layer count");
    }
    for (std::size_t l = 0; l < snap.layers.size(); ++l) {
      if (snap.layers[l].rows() != samples() || snap.layers[l].cols() != m.layer_sizes[l]) {
        throw FormatError("snapshot at epoch " + std::to_string(snap.epoch) + " layer " + std::to_string(l) +
                          " shape disagrees with manifest");
      }
    }
  }
}

fs::path snapshot_path(const fs::path& directory, std::size_t epoch) {
  return directory / ("epoch_" + std::to_string(epoch) + ".act");
}

std::uintmax_t expected_snapshot_size(const Snapshot& snapshot) {
  std::uintmax_t bytes = kSnapshotHeaderBytes;
  for (const auto& m : snapshot.layers) bytes += kLayerHeaderBytes + 8 * m.size();
  return bytes;
}

void write_trace(const ActivationTrace& trace, const fs::path& directory) {
  trace.validate();
  std::error_code ec;
  if (fs::exists(directory, ec)) {
    if (!fs::is_directory(directory)) throw IoError(directory.string() + " exists and is not a directory");
    if (!fs::is_empty(directory)) throw IoError("refusing to write trace into non-empty directory " + directory.string());
  } else {
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  }
  for (const auto& snap : trace.snapshots) atomic_write(snapshot_path(directory, snap.epoch), encode_snapshot(snap));
  atomic_write(directory / kManifestName, manifest_to_json(trace.manifest).dump(1) + "\n");
}

TraceManifest read_manifest(const fs::path& directory) {
  const auto path = directory / kManifestName;
  if (!fs::exists(path)) throw FormatError(path.string() + ": manifest missing");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path);
}

ActivationTrace read_trace(const fs::path& directory) {
  ActivationTrace trace;
  trace.manifest = read_manifest(directory);
  for (auto epoch : trace.manifest.epochs) {
    const auto path = snapshot_path(directory, epoch);
    if (!fs::exists(path)) {
      throw FormatError(path.string() + ": snapshot for manifest epoch " + std::to_string(epoch) + " is missing");
    }
    trace.snapshots.push_back(decode_snapshot(read_file(path), path, epoch, trace.manifest));
  }
  trace.validate();
  return trace;
}

bool trace_complete(const fs::path& directory) {
  try {
    const auto manifest = read_manifest(directory);
    for (auto epoch : manifest.epochs)
      if (!fs::exists(snapshot_path(directory, epoch))) return false;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool bitwise_equal(const ActivationTrace& a, const ActivationTrace& b) {
  if (a.manifest.layer_sizes != b.manifest.layer_sizes || a.manifest.epochs != b.manifest.epochs ||
      a.manifest.labels != b.manifest.labels || a.manifest.dataset_fingerprint != b.manifest.dataset_fingerprint ||
      a.manifest.config != b.manifest.config || a.snapshots.size() != b.snapshots.size()) {
    return false;
  }
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
    const auto& x = a.snapshots[s];
    const auto& y = b.snapshots[s];
    if (x.epoch != y.epoch || x.layers.size() != y.layers.size()) return false;
    for (std::size_t l = 0; l < x.layers.size(); ++l) {
      const auto& p = x.layers[l];
      const auto& q = y.layers[l];
      if (p.rows() != q.rows() || p.cols() != q.cols()) return false;
      if (std::memcmp(p.values().data(), q.values().data(), p.size() * sizeof(double)) != 0) return false;
    }
  }
  return true;
}

}  // namespace infoplane
