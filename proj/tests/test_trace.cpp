#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "infoplane/errors.hpp"
#include "infoplane/network.hpp"
#include "infoplane/trace.hpp"

namespace fs = std::filesystem;
using namespace infoplane;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("infoplane_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ActivationTrace sample_trace() {
  const Dataset ds = generate_dataset(0);
  NetworkConfig c;
  c.epochs = 3;
  c.snapshot_epochs = {0, 1, 3};
  return train(c, ds, make_split(ds, 0.8, 0)).trace;
}

}  // namespace

TEST_CASE("trace round trip is bit-identical") {
  TempDir dir("roundtrip");
  const ActivationTrace t = sample_trace();
  write_trace(t, dir.path);
  CHECK(trace_complete(dir.path));
  const ActivationTrace back = read_trace(dir.path);
  CHECK(bitwise_equal(t, back));
  CHECK(back.snapshots.size() == back.manifest.epochs.size());
  CHECK(back.manifest.labels == t.manifest.labels);
  CHECK(back.manifest.dataset_fingerprint == t.manifest.dataset_fingerprint);
  CHECK(back.manifest.config == t.manifest.config);
  REQUIRE(back.manifest.metrics.size() == 3);
  CHECK(back.manifest.metrics[2].train_accuracy == t.manifest.metrics[2].train_accuracy);
}

TEST_CASE("snapshot file size follows the format") {
  TempDir dir("size");
  const ActivationTrace t = sample_trace();
  write_trace(t, dir.path);
  for (const auto& snap : t.snapshots) {
    std::uintmax_t expected = kSnapshotHeaderBytes;
    for (const auto& l : snap.layers) expected += kLayerHeaderBytes + 8 * l.rows() * l.cols();
    CHECK(expected_snapshot_size(snap) == expected);
    CHECK(fs::file_size(snapshot_path(dir.path, snap.epoch)) == expected);
  }
}

TEST_CASE("writing into a non-empty directory is refused") {
  TempDir dir("nonempty");
  fs::create_directories(dir.path);
  std::ofstream(dir.path / "stray.txt") << "x";
  CHECK_THROWS_AS(write_trace(sample_trace(), dir.path), IoError);
}

TEST_CASE("corrupted traces are rejected") {
  TempDir dir("corrupt");
  const ActivationTrace t = sample_trace();
  write_trace(t, dir.path);
  const fs::path first = snapshot_path(dir.path, 1);

  SUBCASE("bad magic") {
    std::fstream f(first, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(read_trace(dir.path), FormatError);
  }
  SUBCASE("missing epoch") {
    fs::remove(first);
    CHECK_FALSE(trace_complete(dir.path));
    CHECK_THROWS_AS(read_trace(dir.path), FormatError);
  }
  SUBCASE("truncated file") {
    fs::resize_file(first, fs::file_size(first) - 3);
    CHECK_THROWS_AS(read_trace(dir.path), FormatError);
  }
  SUBCASE("trailing bytes") {
    std::ofstream(first, std::ios::app | std::ios::binary) << "junk";
    CHECK_THROWS_AS(read_trace(dir.path), FormatError);
  }
  SUBCASE("missing manifest") {
    fs::remove(dir.path / "manifest.json");
    CHECK_FALSE(trace_complete(dir.path));
    CHECK_THROWS(read_trace(dir.path));
  }
}

TEST_CASE("trace validation catches shape mismatches") {
  ActivationTrace t = sample_trace();
  t.snapshots[1].layers[2] = Matrix(4096, 3);
  CHECK_THROWS(t.validate());
  t = sample_trace();
  t.manifest.epochs = {0, 3, 1};
  CHECK_THROWS(t.validate());
}
