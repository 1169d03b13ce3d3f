#pragma once

#include <complex>
#include <vector>

namespace fraclap::fft {

// In-place radix-2 complex FFT; size must be a power of two.
void transform(std::vector<std::complex<double>>& a, bool inverse);

// d-dimensional transform of a row-major cube with n points per axis.
void transform_nd(std::vector<std::complex<double>>& a, int d, int n,
                  bool inverse);

}  // namespace fraclap::fft
