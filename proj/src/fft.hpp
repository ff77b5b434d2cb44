#pragma once

#include <complex>

#include "pwcert/basis.hpp"

namespace pwcert::detail {

/// In-place unnormalized 3D transform on a row-major grid.
/// sign = -1 computes sum_x f(x) e^{-i G.x}, sign = +1 the inverse sum.
void fft_inplace(const GridShape& shape, std::complex<double>* data, int sign);

}  // namespace pwcert::detail
