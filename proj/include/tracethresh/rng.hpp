#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tracethresh {

// Stateless 64-bit mixer (SplitMix64). Used to turn (master seed, index)
// pairs into well-separated engine seeds for per-replicate streams.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A self-contained random stream. All variate transforms are implemented
// here rather than with std::*_distribution so that draws are identical
// across standard libraries and platforms for a given seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  // Stream for replicate `index` of a run seeded with `master`. Streams are
  // independent of execution order, so parallel runs reproduce serial ones.
  static RngStream substream(std::uint64_t master, std::uint64_t index) {
    return RngStream(splitmix64(master) + 0x9e3779b97f4a7c15ULL * (index + 1));
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
      draw = gen_();
    } while (draw >= limit);
    return draw % n;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Gamma with given shape and scale (Marsaglia-Tsang squeeze).
  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tracethresh
