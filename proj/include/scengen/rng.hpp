#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace scengen {

/// Deterministic random stream: xoshiro256++ seeded through SplitMix64.
/// All distributions are implemented locally so that a (seed, key) pair
/// produces the same draws on every platform and standard library. Keyed
/// substreams give Gibbs update groups and per-instance chains independent
/// streams, which makes instance-parallel execution bit-identical to
/// sequential execution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix(x);
  }

  /// Substream addressed by (seed, key parts).
  static Rng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::uint64_t x = seed;
    for (std::uint64_t part : key) {
      x = splitmix(x);
      x ^= part * 0x9E3779B97F4A7C15ULL;
    }
    return Rng(splitmix(x));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe for log().
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Integer uniform on [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
  }

  /// Standard normal via the Marsaglia polar method; the spare deviate is
  /// discarded so the stream position depends only on the draw count.
  double normal() {
    double u, v, q;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    return u * std::sqrt(-2.0 * std::log(q) / q);
  }

  /// Gamma(shape, rate) in the shape-rate parameterization,
  /// density ∝ x^{shape-1} e^{-rate·x}. Marsaglia-Tsang squeeze for
  /// shape >= 1, with the standard U^{1/shape} boost below 1.
  double gamma(double shape, double rate) {
    return std::exp(log_gamma_draw(shape)) / rate;
  }

  /// log of a Gamma(shape, 1) draw. Working in logs keeps tiny-shape draws
  /// (Beta-process priors use shapes like a/K) away from underflow.
  double log_gamma_draw(double shape) {
    if (shape < 1.0) {
      return log_gamma_draw(shape + 1.0) + std::log(uniform_open()) / shape;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return std::log(d * v);
      }
    }
  }

  /// Beta(alpha, beta) as G_a / (G_a + G_b) computed from log-Gamma draws.
  double beta(double alpha, double beta_shape) {
    const double la = log_gamma_draw(alpha);
    const double lb = log_gamma_draw(beta_shape);
    const double diff = la - lb;
    if (diff >= 0.0) return 1.0 / (1.0 + std::exp(-diff));
    const double e = std::exp(diff);
    return e / (1.0 + e);
  }

 private:
  std::uint64_t state_[4];

  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
};

/// Stable 64-bit mix of two values; used to derive fold and per-case seeds.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9E3779B97F4A7C15ULL + b * 0xD1B54A32D192ED03ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a over a byte string; used to key per-instance forecast chains.
inline std::uint64_t hash_bytes(const char* data, std::size_t n) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace scengen
