#include "ssvep/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssvep {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Bluestein: x[t]*chirp(t) convolved with conj(chirp) yields the DFT after
// a final chirp multiply. chirp(t) = exp(-i*pi*t^2/L).
std::vector<std::complex<double>> bluestein(
    const std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  const std::size_t m = next_power_of_two(2 * n - 1);

  std::vector<std::complex<double>> chirp(n);
  for (std::size_t t = 0; t < n; ++t) {
    // t^2 mod 2n keeps the angle argument small for long inputs.
    const std::uint64_t t2 = (static_cast<std::uint64_t>(t) * t) % (2 * n);
    const double angle = sign * std::numbers::pi * static_cast<double>(t2) /
                         static_cast<double>(n);
    chirp[t] = {std::cos(angle), std::sin(angle)};
  }

  std::vector<std::complex<double>> a(m, {0.0, 0.0});
  std::vector<std::complex<double>> b(m, {0.0, 0.0});
  for (std::size_t t = 0; t < n; ++t) a[t] = x[t] * chirp[t];
  b[0] = std::conj(chirp[0]);
  for (std::size_t t = 1; t < n; ++t) {
    b[t] = std::conj(chirp[t]);
    b[m - t] = b[t];
  }

  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_radix2(a, true);

  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
  return out;
}

}  // namespace

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fft_radix2: size must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen{std::cos(angle), std::sin(angle)};
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t j = 0; j < len / 2; ++j) {
        const auto u = data[i + j];
        const auto v = data[i + j + len / 2] * w;
        data[i + j] = u + v;
        data[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& c : data) c /= static_cast<double>(n);
  }
}

std::vector<std::complex<double>> fourier_transform(
    const std::vector<std::complex<double>>& input) {
  if (input.empty()) return {};
  if (input.size() == 1) return input;
  if (is_power_of_two(input.size())) {
    auto data = input;
    fft_radix2(data, false);
    return data;
  }
  return bluestein(input, false);
}

std::vector<std::complex<double>> inverse_fourier_transform(
    const std::vector<std::complex<double>>& input) {
  if (input.empty()) return {};
  const double n = static_cast<double>(input.size());
  if (input.size() == 1) return input;
  if (is_power_of_two(input.size())) {
    auto data = input;
    fft_radix2(data, true);
    return data;
  }
  auto out = bluestein(input, true);
  for (auto& c : out) c /= n;
  return out;
}

}  // namespace ssvep
