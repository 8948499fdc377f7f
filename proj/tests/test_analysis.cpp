#include <cmath>

#include "doctest.h"
#include "infoplane/analysis.hpp"
#include "infoplane/errors.hpp"
#include "infoplane/network.hpp"

using namespace infoplane;

namespace {

InfoPlane plane_of(const std::vector<std::vector<double>>& rows) {
  InfoPlane p;
  p.itx = Matrix(rows.size(), rows.front().size());
  p.ity = Matrix(rows.size(), rows.front().size(), 0.5);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    p.layers.push_back(r);
    for (std::size_t c = 0; c < rows[r].size(); ++c) p.itx(r, c) = rows[r][c];
  }
  for (std::size_t c = 0; c < rows.front().size(); ++c) p.epochs.push_back(c * 10);
  return p;
}

const std::vector<std::size_t> kOne{0};
const std::vector<std::size_t> kTwo{0, 1};

}  // namespace

TEST_CASE("compression score reference cases") {
  CHECK(compression_score(plane_of({{1, 2, 3}, {0, 1, 1}}), kTwo).network_score == 0.0);
  CHECK(compression_score(plane_of({{4, 2}}), kOne).network_score == 0.5);
  const auto r = compression_score(plane_of({{4, 2}, {3, 3}}), kTwo);
  CHECK(r.network_score == 0.25);
  CHECK(r.per_layer_scores == std::vector<double>{0.5, 0.0});
  CHECK(r.last_layer_score == 0.0);
  CHECK(compression_score(plane_of({{0, 0}}), kOne).network_score == 0.0);
  CHECK_THROWS_AS(compression_score(plane_of({{4, 2}}), std::vector<std::size_t>{}), ArgumentError);
}

TEST_CASE("compression score is scale invariant per layer and bounded") {
  const InfoPlane p = plane_of({{1.0, 3.0, 2.2, 2.9}, {0.3, 0.7, 0.2, 0.1}});
  InfoPlane q = p;
  for (std::size_t c = 0; c < 4; ++c) q.itx(1, c) *= 17.0;
  const double a = compression_score(p, kTwo).network_score;
  const double b = compression_score(q, kTwo).network_score;
  CHECK(a == doctest::Approx(b).epsilon(1e-15));
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);
}

TEST_CASE("hidden rows exclude the output layer") {
  CHECK(hidden_rows(plane_of({{1}, {2}, {3}})) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("averaging planes") {
  const InfoPlane a = plane_of({{2.0}});
  const InfoPlane b = plane_of({{4.0}});
  const std::vector<InfoPlane> ab{a, b}, ba{b, a}, aa{a, a};
  CHECK(average_planes(ab).itx(0, 0) == 3.0);
  CHECK(average_planes(ab).itx == average_planes(ba).itx);
  CHECK(average_planes(aa).itx == a.itx);
  CHECK(average_planes(aa).ity == a.ity);
  const std::vector<InfoPlane> mismatch{a, plane_of({{1.0, 2.0}})};
  CHECK_THROWS_AS(average_planes(mismatch), ArgumentError);
}

TEST_CASE("average first, then score") {
  // Scoring each run and averaging would give 0.25; the averaged plane [3, 3] scores 0.
  const std::vector<InfoPlane> runs{plane_of({{4.0, 2.0}}), plane_of({{2.0, 4.0}})};
  const auto mean = average_planes(runs);
  CHECK(compression_score(mean, kOne).network_score == 0.0);
  CHECK(final_itx_spread(plane_of({{1, 2}, {1, 5}, {0, 4}}), std::vector<std::size_t>{0, 1, 2}) == 3.0);
}

TEST_CASE("max activation report") {
  const Dataset ds = generate_dataset(0);
  NetworkConfig c;
  c.activation = ActivationKind::tanh();
  c.epochs = 2;
  c.snapshot_epochs = {0, 2};
  const auto trace = train(c, ds, make_split(ds, 0.8, 0)).trace;
  const auto report = max_activation_report(trace);
  REQUIRE(report.epochs.size() == 2);
  for (std::size_t e = 0; e < 2; ++e) {
    double m = 0.0;
    for (std::size_t l = 0; l < report.layer_max.cols(); ++l) {
      CHECK(report.layer_max(e, l) <= 1.0);
      m = std::max(m, report.layer_max(e, l));
    }
    CHECK(report.network_max[e] == m);
  }
  ActivationTrace single = trace;
  single.snapshots.resize(1);
  single.manifest.epochs.resize(1);
  CHECK(max_activation_report(single).epochs.size() == 1);
}

TEST_CASE("correlation") {
  const std::vector<double> acc{0.9, 0.8, 0.95, 0.7};
  std::vector<double> neg;
  for (double v : acc) neg.push_back(-v);
  CHECK(correlate(acc, acc).pearson_r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlate(acc, acc).spearman_rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlate(neg, acc).pearson_r == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(correlate(neg, acc).n == 4);
  const std::vector<double> ties{1.0, 1.0, 2.0, 3.0};
  const std::vector<double> rank{1.0, 2.0, 3.0, 4.0};
  CHECK(correlate(ties, rank).spearman_rho == doctest::Approx(0.9486832980505138));
  CHECK_THROWS_AS(correlate(std::vector<double>(4, 0.2), acc), ArgumentError);
  CHECK_THROWS_AS(correlate(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ArgumentError);
  CHECK_THROWS_AS(correlate(acc, std::span<const double>(rank).subspan(0, 3)), ArgumentError);
}
