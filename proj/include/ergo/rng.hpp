#pragma once

// Counter-based random streams. Every stream is keyed by (seed, id0, id1, id2)
// and produces output purely as a function of (key, counter), so any substream
// can be re-opened at any time and two runs with equal keys agree bit for bit.
// Coupled-seed probes rely on this: trajectories started at different points
// but keyed identically consume identical driving noise.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ergo {

namespace detail {

// SplitMix64 finalizer: bijective 64-bit mix with good avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

}  // namespace detail

// 64-bit FNV-1a, used for config/content hashing (stable across platforms).
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t id0 = 0, std::uint64_t id1 = 0,
            std::uint64_t id2 = 0) {
    std::uint64_t k = detail::mix64(seed);
    k = detail::combine(k, id0);
    k = detail::combine(k, id1);
    k = detail::combine(k, id2);
    key_ = k;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0,1): 53-bit mantissa.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]: safe as a log() argument.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
  }

  // Box-Muller, fixed two-draw consumption (no cached spare, no rejection):
  // the draw count per call is constant, which keeps substream alignment trivial.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Inverse-CDF draw from a finite distribution; weights need not be normalized.
  std::size_t categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) {
      if (x < 0.0 || !std::isfinite(x)) throw std::invalid_argument("categorical: bad weight");
      total += x;
    }
    if (!(total > 0.0)) throw std::invalid_argument("categorical: zero total weight");
    const double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return w.size() - 1;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace ergo
