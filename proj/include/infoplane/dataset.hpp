#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "infoplane/matrix.hpp"

namespace infoplane {

inline constexpr std::size_t kInputBits = 12;
inline constexpr std::size_t kGeneratedSamples = std::size_t{1} << kInputBits;

struct Dataset {
  Matrix inputs;                    // P x 12, entries 0.0 / 1.0
  std::vector<std::uint8_t> labels;  // P entries in {0, 1}
  std::string source;               // "generated(<seed>)" or "loaded(<path>)"

  std::size_t size() const noexcept { return labels.size(); }
  std::array<std::size_t, 2> class_counts() const;
  bool balanced() const;
  /// FNV-1a over the input bits and labels, in row order.
  std::uint64_t fingerprint() const;
};

struct Split {
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
  double fraction = 0.8;
};

/// All 4096 12-bit patterns (row i holds the bits of i, most significant
/// first) labelled by a seeded random teacher. Exactly half of the patterns
/// are labelled 1.
Dataset generate_dataset(std::uint64_t seed);

/// Parses the 13-column dataset CSV. Throws ParseError (with line number)
/// on malformed rows and ConsistencyError on conflicting duplicate inputs.
Dataset parse_dataset(const std::string& text, const std::string& source = "loaded(<memory>)");
Dataset load_dataset(const std::filesystem::path& path);

std::string format_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Stratified split: |train| = floor(fraction * P), per-class train counts
/// allocated by largest remainder. Deterministic in `seed`.
Split make_split(const Dataset& dataset, double fraction, std::uint64_t seed);

}  // namespace infoplane
