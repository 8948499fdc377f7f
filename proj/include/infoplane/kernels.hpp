#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "infoplane/matrix.hpp"

// Hot loops of the estimators. Each kernel has an OpenMP version used by the
// library and a plain serial version kept as the test reference; the two
// must agree to floating-point reassociation.

namespace infoplane::kernels {

/// For every row i: log( sum_j exp(-|t_i - t_j|^2 / (2 sigma2)) ).
/// The j = i term is exp(0) = 1, so every result is >= 0.
std::vector<double> gaussian_log_sums(const Matrix& points, double sigma2);

/// Bin index of every value: the number of boundaries <= value
/// (boundaries ascending; a value equal to a boundary lands in the upper bin).
void bin_indices(std::span<const double> values, std::span<const double> boundaries, std::span<std::int32_t> out);

int max_threads();

namespace reference {

std::vector<double> gaussian_log_sums(const Matrix& points, double sigma2);
void bin_indices(std::span<const double> values, std::span<const double> boundaries, std::span<std::int32_t> out);

}  // namespace reference

}  // namespace infoplane::kernels
