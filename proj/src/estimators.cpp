#include "infoplane/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "infoplane/errors.hpp"
#include "infoplane/kernels.hpp"

namespace infoplane {

namespace {

double entropy_from_counts(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

// Dense id per distinct row (ids ordered lexicographically by row).
std::vector<std::size_t> row_ids(const IndexMatrix& rows, std::size_t& distinct) {
  std::vector<std::size_t> order(rows.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = rows.row(a);
    auto rb = rows.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::size_t> ids(rows.rows());
  distinct = 0;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (n > 0 && less(order[n - 1], order[n])) ++distinct;
    ids[order[n]] = distinct;
  }
  if (!order.empty()) ++distinct;
  return ids;
}

void require_finite(const Matrix& m) {
  for (double v : m.values())
    if (!std::isfinite(v)) throw NumericalError("non-finite activation passed to estimator", -1);
}

void require_binary(std::span<const std::uint8_t> labels) {
  for (auto y : labels)
    if (y > 1) throw ArgumentError("labels must be 0 or 1");
}

Matrix rows_with_label(const Matrix& m, std::span<const std::uint8_t> labels, std::uint8_t y) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == y) idx.push_back(i);
  return select_rows(m, std::span<const std::size_t>(idx));
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::uniform: return "uniform";
    case EstimatorKind::ebab: return "ebab";
    case EstimatorKind::kde_fixed: return "kde-fixed";
    case EstimatorKind::kde_adaptive: return "kde-adaptive";
  }
  return "unknown";
}

EstimatorKind parse_estimator(const std::string& name) {
  for (auto k : {EstimatorKind::uniform, EstimatorKind::ebab, EstimatorKind::kde_fixed, EstimatorKind::kde_adaptive})
    if (estimator_name(k) == name) return k;
  throw ArgumentError("unknown estimator \"" + name + "\"");
}

void BinningSpec::validate() const {
  if (n_bins < 2) throw ArgumentError("n_bins must be at least 2");
  if (mode == Mode::uniform_fixed_range && !(lo < hi)) throw ArgumentError("uniform binning needs lo < hi");
}

void KdeSpec::validate() const {
  if (mode == Mode::fixed && !(sigma2 > 0.0)) throw ArgumentError("sigma2 must be positive");
  if (mode == Mode::adaptive && !(sigma0_sq > 0.0)) throw ArgumentError("sigma0_sq must be positive");
}

std::vector<double> ebab_boundaries(std::span<const double> values, std::size_t n_bins) {
  if (n_bins < 2) throw ArgumentError("n_bins must be at least 2");
  std::vector<double> uniq(values.begin(), values.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  const std::size_t count = uniq.size();
  if (count <= 1) return {};

  const std::size_t groups = std::min(n_bins, count);
  const std::size_t base = count / groups;
  const std::size_t extra = count % groups;  // the first `extra` groups take one more
  std::vector<double> boundaries;
  boundaries.reserve(groups - 1);
  std::size_t end = 0;
  for (std::size_t g = 0; g + 1 < groups; ++g) {
    end += base + (g < extra ? 1 : 0);
    const double below = uniq[end - 1];
    const double above = uniq[end];
    double mid = below + (above - below) / 2.0;
    // Adjacent doubles: keep the boundary in (below, above] so the upper-bin
    // rule still separates them.
    if (!(mid > below)) mid = above;
    boundaries.push_back(mid);
  }
  return boundaries;
}

std::vector<double> uniform_boundaries(double lo, double hi, std::size_t n_bins) {
  BinningSpec::uniform(lo, hi, n_bins).validate();
  std::vector<double> edges(n_bins - 1);
  for (std::size_t k = 1; k < n_bins; ++k)
    edges[k - 1] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_bins);
  return edges;
}

IndexMatrix discretize_layer(const Matrix& activations, std::span<const double> boundaries) {
  IndexMatrix out(activations.rows(), activations.cols());
  kernels::bin_indices(activations.values(), boundaries, out.values());
  return out;
}

double discrete_entropy(const IndexMatrix& rows) {
  std::size_t distinct = 0;
  const auto ids = row_ids(rows, distinct);
  std::vector<std::size_t> counts(distinct, 0);
  for (auto id : ids) ++counts[id];
  return entropy_from_counts(counts, ids.size());
}

MIEstimate mi_binned(const Matrix& activations, std::span<const std::uint8_t> labels, const BinningSpec& spec) {
  spec.validate();
  if (labels.size() != activations.rows()) throw ArgumentError("label count does not match activation rows");
  require_binary(labels);
  require_finite(activations);

  MIEstimate est;
  est.estimator = spec.mode == BinningSpec::Mode::ebab ? "ebab" : "uniform";
  if (activations.rows() == 0) return est;

  std::vector<double> boundaries;
  if (spec.mode == BinningSpec::Mode::ebab) {
    boundaries = ebab_boundaries(activations.values(), spec.n_bins);
  } else {
    boundaries = uniform_boundaries(spec.lo, spec.hi, spec.n_bins);
    for (double v : activations.values())
      if (v < spec.lo || v > spec.hi) ++est.range_violations;
  }
  const IndexMatrix bins = discretize_layer(activations, boundaries);

  std::size_t distinct = 0;
  const auto ids = row_ids(bins, distinct);
  std::vector<std::size_t> counts(distinct, 0);
  std::array<std::vector<std::size_t>, 2> class_counts{std::vector<std::size_t>(distinct, 0),
                                                       std::vector<std::size_t>(distinct, 0)};
  std::array<std::size_t, 2> class_totals{0, 0};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ++counts[ids[i]];
    ++class_counts[labels[i]][ids[i]];
    ++class_totals[labels[i]];
  }
  const double total = static_cast<double>(ids.size());
  const double h_t = entropy_from_counts(counts, ids.size());
  double h_t_given_y = 0.0;
  for (int y = 0; y < 2; ++y)
    h_t_given_y += static_cast<double>(class_totals[y]) / total * entropy_from_counts(class_counts[y], class_totals[y]);

  // I(T;Y) <= min(H(T), H(Y)); the clamp only absorbs rounding in the difference.
  est.itx_bits = h_t;
  est.ity_bits = std::clamp(h_t - h_t_given_y, 0.0, std::min(h_t, entropy_from_counts(class_totals, ids.size())));
  return est;
}

double kde_mixture_mi(const Matrix& points, double sigma2) {
  if (!(sigma2 > 0.0)) throw ArgumentError("sigma2 must be positive");
  require_finite(points);
  const std::size_t n = points.rows();
  if (n <= 1) return 0.0;
  const auto log_sums = kernels::gaussian_log_sums(points, sigma2);
  const double mean_log = std::accumulate(log_sums.begin(), log_sums.end(), 0.0) / static_cast<double>(n);
  const double log2_n = std::log2(static_cast<double>(n));
  const double bits = log2_n - mean_log / std::numbers::ln2;
  return std::clamp(bits, 0.0, log2_n);
}

double kde_noise_variance(const Matrix& activations, const KdeSpec& spec) {
  spec.validate();
  if (spec.mode == KdeSpec::Mode::fixed) return spec.sigma2;
  if (activations.empty()) return 0.0;
  if (spec.scaling == KdeScaling::quadratic) {
    double m = 0.0;
    for (double v : activations.values()) m = std::max(m, std::abs(v));
    return spec.sigma0_sq * m * m;
  }
  const double m = *std::max_element(activations.values().begin(), activations.values().end());
  if (m < 0.0) {
    throw ModeError("literal noise scaling needs a nonnegative layer maximum (got " + std::to_string(m) +
                    "); use quadratic scaling");
  }
  return spec.sigma0_sq * m;
}

MIEstimate mi_kde(const Matrix& activations, std::span<const std::uint8_t> labels, const KdeSpec& spec) {
  if (labels.size() != activations.rows()) throw ArgumentError("label count does not match activation rows");
  require_binary(labels);
  require_finite(activations);
  std::array<std::size_t, 2> class_totals{0, 0};
  for (auto y : labels) ++class_totals[y];
  MIEstimate est;
  est.estimator = spec.mode == KdeSpec::Mode::fixed ? "kde-fixed" : "kde-adaptive";
  const double sigma2 = kde_noise_variance(activations, spec);
  est.noise_variance = sigma2;
  if (sigma2 == 0.0 || activations.rows() == 0) return est;

  est.itx_bits = kde_mixture_mi(activations, sigma2);
  const double total = static_cast<double>(activations.rows());
  double conditional = 0.0;
  for (std::uint8_t y : {std::uint8_t{0}, std::uint8_t{1}}) {
    const Matrix subset = rows_with_label(activations, labels, y);
    if (subset.rows() == 0) continue;
    conditional += static_cast<double>(subset.rows()) / total * kde_mixture_mi(subset, sigma2);
  }
  est.ity_bits = std::clamp(est.itx_bits - conditional, 0.0,
                            std::min(est.itx_bits, entropy_from_counts(class_totals, labels.size())));
  return est;
}

std::vector<MIEstimate> estimate_trace(const ActivationTrace& trace, const EstimatorSpec& spec) {
  const auto& labels = trace.manifest.labels;
  std::vector<MIEstimate> out;

  BinningSpec binning;
  KdeSpec kde;
  switch (spec.kind) {
    case EstimatorKind::ebab:
      binning = BinningSpec::ebab(spec.n_bins);
      break;
    case EstimatorKind::uniform: {
      double lo = 0.0;
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& snap : trace.snapshots)
        for (const auto& layer : snap.layers)
          for (double v : layer.values()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
      if (spec.range_lo) lo = *spec.range_lo;
      if (spec.range_hi) hi = *spec.range_hi;
      if (!(hi > lo)) hi = lo + 1.0;
      binning = BinningSpec::uniform(lo, hi, spec.n_bins);
      break;
    }
    case EstimatorKind::kde_fixed:
      kde = KdeSpec::fixed(spec.sigma0_sq);
      break;
    case EstimatorKind::kde_adaptive:
      kde = KdeSpec::adaptive(spec.sigma0_sq, spec.scaling);
      break;
  }

  for (const auto& snap : trace.snapshots) {
    for (std::size_t l = 0; l < snap.layers.size(); ++l) {
      MIEstimate est = (spec.kind == EstimatorKind::ebab || spec.kind == EstimatorKind::uniform)
                           ? mi_binned(snap.layers[l], labels, binning)
                           : mi_kde(snap.layers[l], labels, kde);
      est.layer = l;
      est.epoch = snap.epoch;
      out.push_back(std::move(est));
    }
  }
  return out;
}

}  // namespace infoplane
