#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace lqgcodec {

// Counter-based pseudorandomness. Every draw is a pure function of
// (seed, counter), so encoder and decoder can evaluate the same dither at the
// same time index without sharing mutable state, and trials/components get
// disjoint, reproducible streams on every platform.

namespace rng {

// SplitMix64 finalizer; used as a random-access generator value(seed, n).
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
  return mix(seed + 0x9E3779B97F4A7C15ull * counter);
}

// [0, 1), 53-bit resolution.
inline double unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// (0, 1]; safe under log().
inline double unit_pos(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Disjoint seed domains: process noise and dither must never share a stream.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t domain) {
  return mix(seed ^ domain);
}

constexpr std::uint64_t kDitherDomain = 0x6A09E667F3BCC909ull;
constexpr std::uint64_t kNoiseDomain = 0xBB67AE8584CAA73Bull;

}  // namespace rng

// Shared dither source: component i at time t is a pure function of
// (seed, t, i), uniform on [-delta/2, delta/2).
class DitherStream {
 public:
  DitherStream(std::uint64_t seed, double delta, int dim)
      : seed_(seed), delta_(delta), dim_(dim) {}

  double component(std::uint64_t t, int i) const {
    const std::uint64_t counter = t * static_cast<std::uint64_t>(dim_) +
                                  static_cast<std::uint64_t>(i);
    return (rng::unit(rng::at(seed_, counter)) - 0.5) * delta_;
  }

  Eigen::VectorXd at(std::uint64_t t) const {
    Eigen::VectorXd d(dim_);
    for (int i = 0; i < dim_; ++i) d[i] = component(t, i);
    return d;
  }

  double delta() const { return delta_; }
  int dim() const { return dim_; }

 private:
  std::uint64_t seed_;
  double delta_;
  int dim_;
};

// Standard normals, one per counter (Box-Muller, cosine branch).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

  double at(std::uint64_t n) const {
    const double u1 = rng::unit_pos(rng::at(seed_, 2 * n));
    const double u2 = rng::unit(rng::at(seed_, 2 * n + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd block(std::uint64_t first, int len) const {
    Eigen::VectorXd g(len);
    for (int i = 0; i < len; ++i) g[i] = at(first + static_cast<std::uint64_t>(i));
    return g;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace lqgcodec
