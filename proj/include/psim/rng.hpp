#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace psim {

// splitmix64. Every random draw in a run flows through a single instance owned
// by the world stepper, so a run is a pure function of (config, seed). The
// derivations below (bounded, uniform01, normal, shuffle) are pinned exactly
// because the trace oracle in the tests reproduces the draw sequence
// independently; do not change them without updating that oracle.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n); plain modulo, n is always tiny next to 2^64 here
  std::uint64_t bounded(std::uint64_t n) { return next() % n; }

  // 53-bit uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Box-Muller cosine branch, two draws per call, no cached spare
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
  }

  // Fisher-Yates from the top index down, one bounded(i + 1) per position
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace psim
