#pragma once

#include <complex>
#include <vector>

#include "mixflow/grid.hpp"

namespace mixflow::fft {

/// Forward transform of real samples into mode coefficients, normalized so
/// that values(x) = sum_k coef_k exp(i k.x). Output size equals grid.size().
void forward(const Grid& grid, const std::vector<double>& values,
             std::vector<std::complex<double>>& coefs);

/// Inverse of forward(); imaginary parts (round-off for conjugate-symmetric
/// input) are discarded.
void inverse(const Grid& grid, const std::vector<std::complex<double>>& coefs,
             std::vector<double>& values);

}  // namespace mixflow::fft
