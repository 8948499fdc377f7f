#include <filesystem>
#include <regex>
#include <unistd.h>

#include "doctest.h"
#include "infoplane/analysis.hpp"
#include "infoplane/config_io.hpp"
#include "infoplane/csv_io.hpp"
#include "infoplane/errors.hpp"
#include "infoplane/svg.hpp"

namespace fs = std::filesystem;
using namespace infoplane;

namespace {

InfoPlane plane(std::size_t layers, std::size_t epochs) {
  InfoPlane p;
  p.itx = Matrix(layers, epochs);
  p.ity = Matrix(layers, epochs);
  for (std::size_t l = 0; l < layers; ++l) {
    p.layers.push_back(l);
    for (std::size_t e = 0; e < epochs; ++e) {
      p.itx(l, e) = 12.0 - static_cast<double>(l) - 0.1 * static_cast<double>(e);
      p.ity(l, e) = 0.5 + 0.01 * static_cast<double>(e);
    }
  }
  for (std::size_t e = 0; e < epochs; ++e) p.epochs.push_back(e * e);
  return p;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("estimates CSV round trip keeps every digit") {
  std::vector<MIEstimate> est(3);
  for (std::size_t i = 0; i < 3; ++i) {
    est[i].layer = i;
    est[i].epoch = 10 * i;
    est[i].itx_bits = 1.0 / 3.0 + static_cast<double>(i);
    est[i].ity_bits = 0.1 * static_cast<double>(i);
    est[i].estimator = "ebab";
  }
  const auto rows = parse_estimates(format_estimates("run-a", est));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].run_id == "run-a");
    CHECK(rows[i].estimate.itx_bits == est[i].itx_bits);
    CHECK(rows[i].estimate.ity_bits == est[i].ity_bits);
    CHECK(rows[i].estimate.epoch == est[i].epoch);
  }
  CHECK_THROWS_AS(parse_estimates("bogus header\n"), ParseError);
  CHECK_THROWS_AS(parse_estimates(format_estimates("r", est) + "r,ebab,1,x,0.1,0.2\n"), ParseError);
}

TEST_CASE("plane built from estimates") {
  std::vector<MIEstimate> est;
  for (std::size_t e : {0, 5})
    for (std::size_t l = 0; l < 2; ++l) {
      MIEstimate m;
      m.layer = l;
      m.epoch = e;
      m.itx_bits = static_cast<double>(l + e);
      est.push_back(m);
    }
  const InfoPlane p = plane_from_estimates(est);
  CHECK(p.epochs == std::vector<std::size_t>{0, 5});
  CHECK(p.itx(1, 1) == 6.0);
  est.pop_back();
  CHECK_THROWS_AS(plane_from_estimates(est), ArgumentError);
}

TEST_CASE("configuration JSON") {
  NetworkConfig c;
  c.activation = ActivationKind::prelu(0.1);
  c.epochs = 300;
  c.snapshot_epochs = {0, 100, 300};
  c.l2_lambda = 0.005;
  const NetworkConfig back = config_from_json(config_to_json(c));
  CHECK(back.activation == c.activation);
  CHECK(back.snapshot_epochs == c.snapshot_epochs);
  CHECK(back.l2_lambda == c.l2_lambda);

  const auto defaults = config_from_json(nlohmann::json{{"epochs", 500}, {"activation", "tanh"}});
  CHECK(defaults.snapshot_epochs == NetworkConfig::default_snapshot_epochs(500));
  CHECK(defaults.activation == ActivationKind::tanh());
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"epoch", 5}}), ArgumentError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"activation", "gelu"}}), ArgumentError);
}

TEST_CASE("SVG information plane") {
  const std::string svg = render_information_plane(plane(6, 5));
  CHECK(count(svg, "<polyline") == 6);
  CHECK(svg.find("I(T;X) [bits]") != std::string::npos);
  CHECK(svg == render_information_plane(plane(6, 5)));

  const std::string single = render_information_plane(plane(6, 1));
  CHECK(count(single, "<polyline") == 0);
  CHECK(count(single, "<line") == count(render_information_plane(plane(2, 1)), "<line"));
  CHECK(count(single, "<circle") == 6);
  CHECK(viridis(0.0) != viridis(1.0));
}

TEST_CASE("text files create their parent directory") {
  const fs::path root = fs::temp_directory_path() / ("infoplane_io_" + std::to_string(::getpid()));
  fs::remove_all(root);
  write_text_file(root / "a" / "b.txt", "hello\n");
  CHECK(read_text_file(root / "a" / "b.txt") == "hello\n");
  CHECK_THROWS_AS(read_text_file(root / "missing.txt"), IoError);
  fs::remove_all(root);
}

TEST_CASE("score and max-activation tables") {
  const std::vector<ScoreRow> rows{{"r0", "network", 0.25, 0.9}};
  CHECK(format_scores(rows) == "run_id,layer,score,accuracy\nr0,network,0.25,0.90000000000000002\n");
  MaxActivationReport m;
  m.epochs = {0};
  m.network_max = {2.0};
  m.layer_max = Matrix(1, 2);
  m.layer_max(0, 0) = 1.0;
  m.layer_max(0, 1) = 2.0;
  CHECK(format_max_activations(m) == "epoch,layer,max_abs\n0,0,1\n0,1,2\n0,network,2\n");
}
