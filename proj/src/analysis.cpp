#include "infoplane/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ArgumentError("correlation undefined for a constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

void InfoPlane::validate() const {
  if (itx.rows() != layers.size() || ity.rows() != layers.size() || itx.cols() != epochs.size() ||
      ity.cols() != epochs.size()) {
    throw ArgumentError("info plane shape does not match its layer/epoch labels");
  }
  for (std::size_t i = 1; i < epochs.size(); ++i)
    if (epochs[i] <= epochs[i - 1]) throw ArgumentError("info plane epochs must be strictly increasing");
}

InfoPlane plane_from_estimates(std::span<const MIEstimate> estimates) {
  std::vector<std::size_t> layers;
  std::vector<std::size_t> epochs;
  for (const auto& e : estimates) {
    layers.push_back(e.layer);
    epochs.push_back(e.epoch);
  }
  std::sort(layers.begin(), layers.end());
  layers.erase(std::unique(layers.begin(), layers.end()), layers.end());
  std::sort(epochs.begin(), epochs.end());
  epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());

  InfoPlane plane{Matrix(layers.size(), epochs.size()), Matrix(layers.size(), epochs.size()), layers, epochs};
  Matrix seen(layers.size(), epochs.size(), 0.0);
  for (const auto& e : estimates) {
    const auto r = static_cast<std::size_t>(std::lower_bound(layers.begin(), layers.end(), e.layer) - layers.begin());
    const auto c = static_cast<std::size_t>(std::lower_bound(epochs.begin(), epochs.end(), e.epoch) - epochs.begin());
    if (seen(r, c) != 0.0) {
      throw ArgumentError("duplicate estimate for layer " + std::to_string(e.layer) + " epoch " + std::to_string(e.epoch));
    }
    seen(r, c) = 1.0;
    plane.itx(r, c) = e.itx_bits;
    plane.ity(r, c) = e.ity_bits;
  }
  for (double s : seen.values())
    if (s == 0.0) throw ArgumentError("estimates do not cover every (layer, epoch) pair");
  return plane;
}

CompressionReport compression_score(const InfoPlane& plane, std::span<const std::size_t> layer_subset) {
  plane.validate();
  if (plane.layer_count() == 0 || plane.epoch_count() == 0) throw ArgumentError("empty info plane");
  if (layer_subset.empty()) throw ArgumentError("empty layer subset");

  CompressionReport report;
  report.layer_subset.assign(layer_subset.begin(), layer_subset.end());
  const std::size_t last = plane.epoch_count() - 1;
  for (std::size_t k = 0; k < plane.layer_count(); ++k) {
    auto row = plane.itx.row(k);
    const double peak = *std::max_element(row.begin(), row.end());
    report.per_layer_scores.push_back(peak > 0.0 ? std::clamp(1.0 - row[last] / peak, 0.0, 1.0) : 0.0);
  }
  double total = 0.0;
  for (auto k : layer_subset) {
    if (k >= plane.layer_count()) throw ArgumentError("layer subset index out of range");
    total += report.per_layer_scores[k];
  }
  report.network_score = total / static_cast<double>(layer_subset.size());
  report.last_layer_score = report.per_layer_scores.back();
  return report;
}

std::vector<std::size_t> hidden_rows(const InfoPlane& plane) {
  std::vector<std::size_t> rows(plane.layer_count() > 0 ? plane.layer_count() - 1 : 0);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

InfoPlane average_planes(std::span<const InfoPlane> planes) {
  if (planes.empty()) throw ArgumentError("no planes to average");
  InfoPlane out = planes.front();
  out.validate();
  for (std::size_t p = 1; p < planes.size(); ++p) {
    const auto& q = planes[p];
    if (q.layers != out.layers || q.epochs != out.epochs || q.itx.rows() != out.itx.rows() ||
        q.itx.cols() != out.itx.cols()) {
      throw ArgumentError("planes disagree on layers or epochs");
    }
    for (std::size_t i = 0; i < out.itx.size(); ++i) {
      out.itx.values()[i] += q.itx.values()[i];
      out.ity.values()[i] += q.ity.values()[i];
    }
  }
  const double n = static_cast<double>(planes.size());
  for (double& v : out.itx.values()) v /= n;
  for (double& v : out.ity.values()) v /= n;
  return out;
}

double final_itx_spread(const InfoPlane& plane, std::span<const std::size_t> rows) {
  if (rows.empty() || plane.epoch_count() == 0) throw ArgumentError("spread needs rows and epochs");
  const std::size_t last = plane.epoch_count() - 1;
  double lo = plane.itx(rows.front(), last);
  double hi = lo;
  for (auto r : rows) {
    lo = std::min(lo, plane.itx(r, last));
    hi = std::max(hi, plane.itx(r, last));
  }
  return hi - lo;
}

MaxActivationReport max_activation_report(const ActivationTrace& trace) {
  if (trace.snapshots.empty()) throw ArgumentError("trace has no snapshots");
  MaxActivationReport report;
  const std::size_t layers = trace.manifest.layer_sizes.size();
  report.layer_max = Matrix(trace.snapshots.size(), layers);
  for (std::size_t s = 0; s < trace.snapshots.size(); ++s) {
    const auto& snap = trace.snapshots[s];
    report.epochs.push_back(snap.epoch);
    double network = 0.0;
    for (std::size_t l = 0; l < snap.layers.size(); ++l) {
      double m = 0.0;
      for (double v : snap.layers[l].values()) m = std::max(m, std::abs(v));
      report.layer_max(s, l) = m;
      network = std::max(network, m);
    }
    report.network_max.push_back(network);
  }
  return report;
}

Correlation correlate(std::span<const double> scores, std::span<const double> accuracies) {
  if (scores.size() != accuracies.size()) throw ArgumentError("scores and accuracies differ in length");
  if (scores.size() < 3) throw ArgumentError("correlation needs at least 3 points");
  Correlation c;
  c.n = scores.size();
  c.pearson_r = pearson(scores, accuracies);
  const auto rs = average_ranks(scores);
  const auto ra = average_ranks(accuracies);
  c.spearman_rho = pearson(rs, ra);
  return c;
}

}  // namespace infoplane
