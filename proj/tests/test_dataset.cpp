#include <algorithm>
#include <set>
#include <string>

#include "doctest.h"
#include "infoplane/dataset.hpp"
#include "infoplane/errors.hpp"

using namespace infoplane;

namespace {

std::string row(std::initializer_list<int> bits, int label) {
  std::string s;
  for (int b : bits) s += std::to_string(b) + ",";
  return s + std::to_string(label) + "\n";
}

}  // namespace

TEST_CASE("generated dataset enumerates the 12-bit space") {
  const Dataset ds = generate_dataset(0);
  REQUIRE(ds.size() == 4096);
  CHECK(ds.inputs.cols() == 12);
  std::set<std::vector<double>> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto r = ds.inputs.row(i);
    rows.emplace(r.begin(), r.end());
    // row i holds the bits of i, most significant first
    std::size_t value = 0;
    for (double b : r) value = value * 2 + static_cast<std::size_t>(b);
    CHECK(value == i);
  }
  CHECK(rows.size() == 4096);
}

TEST_CASE("generated labels are exactly balanced") {
  for (std::uint64_t seed : {0, 1, 7, 123}) {
    const auto counts = generate_dataset(seed).class_counts();
    CHECK(counts[0] == 2048);
    CHECK(counts[1] == 2048);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const Dataset a = generate_dataset(7);
  const Dataset b = generate_dataset(7);
  CHECK(a.inputs == b.inputs);
  CHECK(a.labels == b.labels);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(generate_dataset(8).labels != a.labels);
}

TEST_CASE("dataset text round trip") {
  const Dataset ds = generate_dataset(2);
  const Dataset back = parse_dataset(format_dataset(ds));
  CHECK(back.inputs == ds.inputs);
  CHECK(back.labels == ds.labels);
}

TEST_CASE("parse a small dataset") {
  const std::string text = row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0) + row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 1) +
                           row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0}, 0) + row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1}, 1);
  const Dataset ds = parse_dataset(text);
  CHECK(ds.size() == 4);
  CHECK(ds.balanced());
}

TEST_CASE("non-binary token is a parse error with its line") {
  const std::string text =
      row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0) + row({0, 1, 2, 0, 1, 0, 1, 0, 1, 0, 1, 0}, 1);
  try {
    parse_dataset(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_dataset("0,1,0\n"), ParseError);
}

TEST_CASE("conflicting duplicate rows are rejected") {
  const std::string text = row({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 0) + row({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 1);
  CHECK_THROWS_AS(parse_dataset(text), ConsistencyError);
}

TEST_CASE("split sizes and partition") {
  const Dataset ds = generate_dataset(0);
  const Split s = make_split(ds, 0.8, 0);
  CHECK(s.train_indices.size() == 3276);
  CHECK(s.test_indices.size() == 820);
  std::vector<std::size_t> all = s.train_indices;
  all.insert(all.end(), s.test_indices.begin(), s.test_indices.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) REQUIRE(all[i] == i);

  std::size_t ones = 0;
  for (auto i : s.train_indices) ones += ds.labels[i];
  const long zeros = static_cast<long>(s.train_indices.size() - ones);
  CHECK(std::abs(zeros - static_cast<long>(ones)) <= 1);
}

TEST_CASE("stratified split of a tiny balanced set") {
  const std::string text = row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0) + row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 1) +
                           row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0}, 0) + row({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1}, 1);
  const Dataset ds = parse_dataset(text);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Split s = make_split(ds, 0.5, seed);
    REQUIRE(s.train_indices.size() == 2);
    CHECK(ds.labels[s.train_indices[0]] != ds.labels[s.train_indices[1]]);
    CHECK(ds.labels[s.test_indices[0]] != ds.labels[s.test_indices[1]]);
  }
}

TEST_CASE("split is deterministic and rejects bad fractions") {
  const Dataset ds = generate_dataset(0);
  const Split a = make_split(ds, 0.8, 5);
  const Split b = make_split(ds, 0.8, 5);
  CHECK(a.train_indices == b.train_indices);
  CHECK(a.test_indices == b.test_indices);
  CHECK(make_split(ds, 0.8, 6).train_indices != a.train_indices);
  CHECK_THROWS_AS(make_split(ds, 0.0, 0), ArgumentError);
  CHECK_THROWS_AS(make_split(ds, 1.0, 0), ArgumentError);
}
