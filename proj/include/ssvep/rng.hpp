#pragma once

#include <cstdint>
#include <random>

namespace ssvep {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent substreams from a base
// seed so per-trial generation is order-independent.
std::uint64_t mix_seed(std::uint64_t x);
Rng substream(std::uint64_t seed, std::uint64_t index);

// Uniform draw in [lo, hi). Implemented on the raw engine output rather
// than std::uniform_real_distribution so streams are identical across
// standard libraries.
double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);

// Standard normal via Box-Muller (two engine draws per call, no cache).
double gaussian(Rng& rng);

// Knuth's product-of-uniforms Poisson sampler; fine for the small event
// rates used here.
int poisson(Rng& rng, double mean);

// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace ssvep
