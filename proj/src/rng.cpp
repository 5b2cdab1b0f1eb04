#include "ssvep/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssvep {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix_seed(seed ^ mix_seed(index)));
}

double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double gaussian(Rng& rng) {
  // First uniform shifted into (0, 1] so the log never sees zero.
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int poisson(Rng& rng, double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
  if (mean == 0.0) return 0;
  const double limit = std::exp(-mean);
  int k = 0;
  double product = 1.0;
  do {
    ++k;
    product *= uniform(rng);
  } while (product > limit);
  return k - 1;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= bound);
  return draw % n;
}

}  // namespace ssvep
