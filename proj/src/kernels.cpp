#include "infoplane/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace infoplane::kernels {

namespace {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    d2 += d * d;
  }
  return d2;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<double> gaussian_log_sums(const Matrix& points, double sigma2) {
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
  const double scale = -0.5 / sigma2;
  std::vector<double> out(points.rows());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ti = points.row(static_cast<std::size_t>(i));
    double sum = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      sum += std::exp(scale * squared_distance(ti, points.row(static_cast<std::size_t>(j))));
    }
    out[static_cast<std::size_t>(i)] = std::log(sum);
  }
  return out;
}

void bin_indices(std::span<const double> values, std::span<const double> boundaries, std::span<std::int32_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), values[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(it - boundaries.begin());
  }
}

namespace reference {

std::vector<double> gaussian_log_sums(const Matrix& points, double sigma2) {
  std::vector<double> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < points.rows(); ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < points.cols(); ++c) {
        const double d = points(i, c) - points(j, c);
        d2 += d * d;
      }
      sum += std::exp(-d2 / (2.0 * sigma2));
    }
    out[i] = std::log(sum);
  }
  return out;
}

void bin_indices(std::span<const double> values, std::span<const double> boundaries, std::span<std::int32_t> out) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::int32_t index = 0;
    for (double b : boundaries)
      if (b <= values[i]) ++index;
    out[i] = index;
  }
}

}  // namespace reference

}  // namespace infoplane::kernels
