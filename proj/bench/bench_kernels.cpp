// Serial reference vs OpenMP kernels on a layer-sized workload.
//
//   bench_kernels [samples] [units] [repeats]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "infoplane/estimators.hpp"
#include "infoplane/kernels.hpp"

using infoplane::Matrix;
namespace kernels = infoplane::kernels;

namespace {

template <typename F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4096;
  const std::size_t units = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 10;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix points(samples, units);
  for (double& v : points.values()) v = std::max(0.0, normal(rng));
  const double sigma2 = 1e-3;

  std::vector<double> serial, parallel;
  const double t_serial = best_ms(repeats, [&] { serial = kernels::reference::gaussian_log_sums(points, sigma2); });
  const double t_parallel = best_ms(repeats, [&] { parallel = kernels::gaussian_log_sums(points, sigma2); });
  double max_diff = 0.0;
  for (std::size_t i = 0; i < samples; ++i) max_diff = std::max(max_diff, std::abs(serial[i] - parallel[i]));

  const auto boundaries = infoplane::ebab_boundaries(points.values(), 30);
  std::vector<std::int32_t> bins_serial(points.size()), bins_parallel(points.size());
  const double b_serial = best_ms(repeats, [&] { kernels::reference::bin_indices(points.values(), boundaries, bins_serial); });
  const double b_parallel = best_ms(repeats, [&] { kernels::bin_indices(points.values(), boundaries, bins_parallel); });

  std::printf("threads: %d, points: %zu x %zu\n", kernels::max_threads(), samples, units);
  std::printf("gaussian_log_sums  serial %9.2f ms  openmp %9.2f ms  speedup %5.2fx  max |diff| %.3g\n", t_serial,
              t_parallel, t_serial / t_parallel, max_diff);
  std::printf("bin_indices        serial %9.2f ms  openmp %9.2f ms  speedup %5.2fx  identical %s\n", b_serial,
              b_parallel, b_serial / b_parallel, bins_serial == bins_parallel ? "yes" : "no");
  return 0;
}
