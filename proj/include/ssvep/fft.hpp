#pragma once

#include <complex>
#include <vector>

namespace ssvep {

// Forward DFT of an arbitrary-length complex sequence:
//   X[k] = sum_t x[t] * exp(-2*pi*i*k*t/L)
// Power-of-two lengths go through an iterative radix-2 transform; everything
// else through Bluestein's chirp-z reduction to a padded power of two, so a
// 1285-sample trial costs three 4096-point transforms instead of O(L^2).
std::vector<std::complex<double>> fourier_transform(
    const std::vector<std::complex<double>>& input);

// Inverse DFT, normalized by 1/L.
std::vector<std::complex<double>> inverse_fourier_transform(
    const std::vector<std::complex<double>>& input);

// In-place radix-2 transform; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace ssvep
