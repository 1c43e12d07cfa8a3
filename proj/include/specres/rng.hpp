#pragma once

// Deterministic random numbers for the experiment harness.
//
// Reproducibility across platforms matters more than statistical luxury here,
// so nothing implementation-defined is used: the engine is std::mt19937_64
// (fully specified by the standard) and all transforms are written out
// explicitly.  Gaussians come from the Box-Muller transform, cosine branch
// only: each variate consumes exactly two engine draws, which keeps the
// stream layout independent of call history.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "specres/measure.hpp"

namespace specres {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable per-cell seed for a (K, lambda, trial) sub-stream.  Chained rather
// than XOR-folded so that distinct tuples never collide by cancellation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) noexcept {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1), 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_open01() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cosine branch).
  double gaussian() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Uniform point on the unit circle.
  Complex unit_phase() { return std::polar(1.0, kTwoPi * uniform01()); }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace specres
