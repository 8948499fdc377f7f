#include "infoplane/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& hash, std::uint8_t byte) {
  hash ^= byte;
  hash *= kFnvPrime;
}

// Teacher scores: a random linear term plus a random pairwise interaction
// term over the +-1 encoding of the bits.
std::vector<double> teacher_scores(const Matrix& inputs, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, kInputBits> linear{};
  for (double& w : linear) w = normal(rng);
  std::array<std::array<double, kInputBits>, kInputBits> pairwise{};
  const double pair_scale = 0.5 / std::sqrt(static_cast<double>(kInputBits));
  for (std::size_t j = 0; j < kInputBits; ++j)
    for (std::size_t k = j + 1; k < kInputBits; ++k) pairwise[j][k] = pair_scale * normal(rng);

  std::vector<double> scores(inputs.rows());
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    std::array<double, kInputBits> z{};
    for (std::size_t j = 0; j < kInputBits; ++j) z[j] = 2.0 * inputs(i, j) - 1.0;
    double s = 0.0;
    for (std::size_t j = 0; j < kInputBits; ++j) {
      s += linear[j] * z[j];
      for (std::size_t k = j + 1; k < kInputBits; ++k) s += pairwise[j][k] * z[j] * z[k];
    }
    scores[i] = s;
  }
  return scores;
}

}  // namespace

std::array<std::size_t, 2> Dataset::class_counts() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (auto y : labels) ++counts[y];
  return counts;
}

bool Dataset::balanced() const {
  auto c = class_counts();
  return c[0] == c[1];
}

std::uint64_t Dataset::fingerprint() const {
  std::uint64_t hash = kFnvOffset;
  for (std::size_t i = 0; i < size(); ++i) {
    for (double bit : inputs.row(i)) fnv_mix(hash, bit != 0.0 ? 1 : 0);
    fnv_mix(hash, labels[i]);
  }
  return hash;
}

Dataset generate_dataset(std::uint64_t seed) {
  Dataset ds;
  ds.inputs = Matrix(kGeneratedSamples, kInputBits);
  for (std::size_t i = 0; i < kGeneratedSamples; ++i)
    for (std::size_t j = 0; j < kInputBits; ++j)
      ds.inputs(i, j) = static_cast<double>((i >> (kInputBits - 1 - j)) & 1U);

  std::mt19937_64 rng(seed);
  const auto scores = teacher_scores(ds.inputs, rng);

  // Random tie-break key so equal scores still split deterministically.
  std::vector<std::uint64_t> tie(kGeneratedSamples);
  for (auto& t : tie) t = rng();
  std::vector<std::size_t> order(kGeneratedSamples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return tie[a] < tie[b];
  });

  ds.labels.assign(kGeneratedSamples, 0);
  for (std::size_t r = kGeneratedSamples / 2; r < kGeneratedSamples; ++r) ds.labels[order[r]] = 1;
  ds.source = "generated(" + std::to_string(seed) + ")";
  return ds;
}

Dataset parse_dataset(const std::string& text, const std::string& source) {
  constexpr std::size_t kColumns = kInputBits + 1;
  std::vector<double> bits;
  std::vector<std::uint8_t> labels;
  std::map<std::vector<std::uint8_t>, std::pair<std::uint8_t, std::size_t>> seen;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::uint8_t> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto token = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (token != "0" && token != "1") {
        throw ParseError("non-binary token \"" + token + "\"", line_no);
      }
      row.push_back(token == "1" ? 1 : 0);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != kColumns) {
      throw ParseError("expected " + std::to_string(kColumns) + " tokens, got " + std::to_string(row.size()),
                       line_no);
    }
    const std::uint8_t label = row.back();
    row.pop_back();
    auto [it, inserted] = seen.try_emplace(row, label, line_no);
    if (!inserted && it->second.first != label) {
      throw ConsistencyError("input on line " + std::to_string(line_no) + " repeats line " +
                             std::to_string(it->second.second) + " with a different label");
    }
    for (auto b : row) bits.push_back(b);
    labels.push_back(label);
  }

  Dataset ds;
  ds.inputs = Matrix(labels.size(), kInputBits, std::move(bits));
  ds.labels = std::move(labels);
  ds.source = source;
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), "loaded(" + path.string() + ")");
}

std::string format_dataset(const Dataset& dataset) {
  std::string out;
  out.reserve(dataset.size() * (2 * (kInputBits + 1)));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double bit : dataset.inputs.row(i)) {
      out += bit != 0.0 ? '1' : '0';
      out += ',';
    }
    out += dataset.labels[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  out << format_dataset(dataset);
  if (!out) throw IoError("write failed for " + path.string());
}

Split make_split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("split fraction must lie in (0, 1)");
  }
  const std::size_t total = dataset.size();
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < total; ++i) by_class[dataset.labels[i]].push_back(i);

  // Largest-remainder allocation of the train budget across the two classes.
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t allocated = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(n_train) * static_cast<double>(by_class[c].size()) /
                         static_cast<double>(total);
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    allocated += quota[c];
  }
  while (allocated < n_train) {
    const int c = remainder[0] >= remainder[1] ? 0 : 1;
    ++quota[c];
    remainder[c] = -1.0;
    ++allocated;
  }

  std::mt19937_64 rng(seed);
  Split split;
  split.fraction = fraction;
  for (int c = 0; c < 2; ++c) {
    auto members = by_class[c];
    std::shuffle(members.begin(), members.end(), rng);
    split.train_indices.insert(split.train_indices.end(), members.begin(), members.begin() + quota[c]);
    split.test_indices.insert(split.test_indices.end(), members.begin() + quota[c], members.end());
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

}  // namespace infoplane
