#include <cmath>
#include <random>

#include "doctest.h"
#include "infoplane/errors.hpp"
#include "infoplane/estimators.hpp"
#include "support/oracles.hpp"

using namespace infoplane;

namespace {

Matrix column(std::initializer_list<double> values) {
  Matrix m(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

Matrix random_layer(std::size_t p, std::size_t u, std::uint64_t seed, double scale = 1.0) {
  Matrix m(p, u);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

std::vector<std::uint8_t> alternating(std::size_t p) {
  std::vector<std::uint8_t> y(p);
  for (std::size_t i = 0; i < p; ++i) y[i] = i % 2;
  return y;
}

}  // namespace

TEST_CASE("EBAB boundaries") {
  std::vector<double> hundred;
  for (int v = 100; v >= 1; --v) hundred.push_back(v);
  hundred.push_back(42.0);  // duplicates do not shift the partition
  CHECK(ebab_boundaries(hundred, 4) == std::vector<double>{25.5, 50.5, 75.5});

  const std::vector<double> constant(17, 3.25);
  CHECK(ebab_boundaries(constant, 30).empty());

  const std::vector<double> three{3.0, 1.0, 2.0, 2.0};
  CHECK(ebab_boundaries(three, 8) == std::vector<double>{1.5, 2.5});

  CHECK_THROWS_AS(ebab_boundaries(three, 1), ArgumentError);
}

TEST_CASE("EBAB separates adjacent doubles") {
  const double a = 1.0;
  const double b = std::nextafter(a, 2.0);
  const std::vector<double> values{a, b};
  const auto bounds = ebab_boundaries(values, 2);
  REQUIRE(bounds.size() == 1);
  const IndexMatrix bins = discretize_layer(column({a, b}), bounds);
  CHECK(bins(0, 0) == 0);
  CHECK(bins(1, 0) == 1);
}

TEST_CASE("discretize layer") {
  const std::vector<double> bounds{1.0, 2.0, 3.0};
  const IndexMatrix bins = discretize_layer(column({-5.0, 0.5, 1.0, 1.5, 2.0, 9.0}), bounds);
  CHECK(bins(0, 0) == 0);
  CHECK(bins(1, 0) == 0);
  CHECK(bins(2, 0) == 1);  // equal to a boundary: upper bin
  CHECK(bins(3, 0) == 1);
  CHECK(bins(4, 0) == 2);
  CHECK(bins(5, 0) == 3);
  const IndexMatrix none = discretize_layer(column({-1.0, 4.0}), {});
  CHECK(none(0, 0) == 0);
  CHECK(none(1, 0) == 0);
}

TEST_CASE("discrete entropy") {
  IndexMatrix same(5, 2, 3);
  CHECK(discrete_entropy(same) == 0.0);

  IndexMatrix distinct(8, 1);
  for (std::size_t i = 0; i < 8; ++i) distinct(i, 0) = static_cast<int>(i);
  CHECK(discrete_entropy(distinct) == doctest::Approx(3.0).epsilon(1e-15));

  IndexMatrix mult(4, 2);
  mult(0, 0) = 1;
  mult(1, 0) = 1;
  mult(2, 1) = 5;
  CHECK(discrete_entropy(mult) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("binned MI reference cases") {
  const auto labels = alternating(64);
  Matrix constant(64, 3, 0.7);
  auto c = mi_binned(constant, labels, BinningSpec::ebab());
  CHECK(c.itx_bits == 0.0);
  CHECK(c.ity_bits == 0.0);

  Matrix aligned(64, 1);
  for (std::size_t i = 0; i < 64; ++i) aligned(i, 0) = labels[i];
  for (const auto& spec : {BinningSpec::ebab(), BinningSpec::uniform(0.0, 1.0)}) {
    const auto e = mi_binned(aligned, labels, spec);
    CHECK(e.itx_bits == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.ity_bits == doctest::Approx(1.0).epsilon(1e-15));
  }

  Matrix distinct(64, 1);
  for (std::size_t i = 0; i < 64; ++i) distinct(i, 0) = static_cast<double>(i);
  const auto d = mi_binned(distinct, labels, BinningSpec::ebab(64));
  CHECK(d.itx_bits == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(d.ity_bits == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("uniform binning reports range violations") {
  const auto labels = alternating(4);
  const auto e = mi_binned(column({-1.0, 0.5, 0.7, 3.0}), labels, BinningSpec::uniform(0.0, 1.0, 4));
  CHECK(e.range_violations == 2);
  CHECK_THROWS_AS(mi_binned(column({0.0, 1.0}), alternating(3), BinningSpec::ebab()), ArgumentError);
  CHECK_THROWS_AS(BinningSpec::uniform(1.0, 1.0).validate(), ArgumentError);
  std::vector<std::uint8_t> bad{0, 2};
  CHECK_THROWS_AS(mi_binned(column({0.0, 1.0}), bad, BinningSpec::ebab()), ArgumentError);
}

TEST_CASE("binned MI agrees with the brute-force oracle") {
  std::mt19937_64 rng(77);
  for (int n = 0; n < 100; ++n) {
    const std::size_t p = 2 + rng() % 11;
    const std::size_t u = 1 + rng() % 3;
    Matrix a(p, u);
    for (double& v : a.values()) v = static_cast<double>(rng() % 3);
    std::vector<std::uint8_t> y(p);
    for (auto& v : y) v = rng() % 2;
    const auto [h, mi] = testing::brute_force_mi(a, y);
    const auto e = mi_binned(a, y, BinningSpec::ebab(30));
    CHECK(std::abs(e.itx_bits - h) <= 1e-12);
    CHECK(std::abs(e.ity_bits - mi) <= 1e-12);
  }
}

TEST_CASE("EBAB is invariant under strictly increasing transforms") {
  const auto labels = alternating(500);
  const Matrix a = random_layer(500, 4, 9);
  const auto base = mi_binned(a, labels, BinningSpec::ebab());
  for (auto f : {+[](double v) { return std::exp(v); }, +[](double v) { return std::tanh(v); },
                 +[](double v) { return 3.0 * v * v * v + v; }}) {
    Matrix t = a;
    for (double& v : t.values()) v = f(v);
    const auto e = mi_binned(t, labels, BinningSpec::ebab());
    CHECK(e.itx_bits == base.itx_bits);
    CHECK(e.ity_bits == base.ity_bits);
  }
}

TEST_CASE("binned bounds hold on random layers") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto labels = alternating(256);
    const Matrix a = random_layer(256, 1 + seed % 5, seed);
    for (const auto& spec : {BinningSpec::ebab(), BinningSpec::uniform(-3.0, 3.0)}) {
      const auto e = mi_binned(a, labels, spec);
      CHECK(e.ity_bits >= 0.0);
      CHECK(e.ity_bits <= std::min(e.itx_bits, 1.0));
      CHECK(e.itx_bits <= 8.0);
    }
  }
}

TEST_CASE("KDE mixture bound reference cases") {
  Matrix same(2, 4, 1.5);
  CHECK(kde_mixture_mi(same, 0.3) == 0.0);
  Matrix far(2, 1);
  far(1, 0) = 1e4;
  CHECK(kde_mixture_mi(far, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix mid(2, 1);
  mid(1, 0) = std::sqrt(2.0 * 0.4);
  CHECK(std::abs(kde_mixture_mi(mid, 0.4) - (1.0 - std::log2(1.0 + std::exp(-1.0)))) <= 1e-12);
  CHECK(kde_mixture_mi(Matrix(1, 3, 0.0), 1.0) == 0.0);
  CHECK_THROWS_AS(kde_mixture_mi(mid, 0.0), ArgumentError);
  Matrix bad = mid;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(kde_mixture_mi(bad, 1.0), NumericalError);
}

TEST_CASE("KDE bounds and limits") {
  const auto labels = alternating(200);
  const Matrix a = random_layer(200, 3, 4);
  const auto e = mi_kde(a, labels, KdeSpec::adaptive());
  CHECK(e.itx_bits >= 0.0);
  CHECK(e.itx_bits <= std::log2(200.0) + 1e-9);
  CHECK(e.ity_bits >= 0.0);
  CHECK(e.ity_bits <= std::min(e.itx_bits, 1.0));
  CHECK(mi_kde(a, labels, KdeSpec::fixed(1e12)).itx_bits < 1e-9);
}

TEST_CASE("adaptive KDE noise") {
  const auto labels = alternating(100);
  Matrix tanh_layer = random_layer(100, 3, 5, 2.0);
  for (double& v : tanh_layer.values()) v = std::tanh(v);
  CHECK(kde_noise_variance(tanh_layer, KdeSpec::adaptive(1e-3)) <= 1e-3);

  const Matrix a = random_layer(100, 3, 6);
  const auto base = mi_kde(a, labels, KdeSpec::adaptive());
  for (double c : {0.01, 3.0, 250.0}) {
    Matrix scaled = a;
    for (double& v : scaled.values()) v *= c;
    CHECK(std::abs(mi_kde(scaled, labels, KdeSpec::adaptive()).itx_bits - base.itx_bits) < 1e-9);
  }

  const auto zero = mi_kde(Matrix(100, 2, 0.0), labels, KdeSpec::adaptive());
  CHECK(zero.itx_bits == 0.0);
  CHECK(zero.ity_bits == 0.0);

  Matrix negative(100, 2, -0.5);
  negative(3, 1) = -2.0;
  CHECK_THROWS_AS(mi_kde(negative, labels, KdeSpec::adaptive(1e-3, KdeScaling::literal)), ModeError);
  CHECK_NOTHROW(mi_kde(negative, labels, KdeSpec::adaptive(1e-3, KdeScaling::quadratic)));
  Matrix positive(2, 1, 4.0);
  CHECK(kde_noise_variance(positive, KdeSpec::adaptive(1e-3, KdeScaling::literal)) == doctest::Approx(4e-3));
}

TEST_CASE("estimator names") {
  for (auto k : {EstimatorKind::uniform, EstimatorKind::ebab, EstimatorKind::kde_fixed, EstimatorKind::kde_adaptive})
    CHECK(parse_estimator(estimator_name(k)) == k);
  CHECK_THROWS_AS(parse_estimator("histogram"), ArgumentError);
}

TEST_CASE("estimate_trace covers every layer and epoch") {
  const Dataset ds = generate_dataset(0);
  NetworkConfig c;
  c.epochs = 2;
  c.snapshot_epochs = {0, 2};
  const auto trace = train(c, ds, make_split(ds, 0.8, 0)).trace;
  for (auto kind : {EstimatorKind::uniform, EstimatorKind::ebab}) {
    EstimatorSpec spec;
    spec.kind = kind;
    const auto est = estimate_trace(trace, spec);
    REQUIRE(est.size() == 12);
    CHECK(est[7].epoch == 2);
    CHECK(est[7].layer == 1);
    for (const auto& e : est) {
      CHECK(e.itx_bits <= 12.0 + 1e-9);
      CHECK(e.ity_bits <= 1.0);
      if (kind == EstimatorKind::uniform) CHECK(e.range_violations == 0);
    }
  }
}
