#pragma once

#include "pmog/common.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pmog {

// Seeded generator with explicitly defined draw semantics. The engine sequence
// (mt19937_64) is fixed by the standard and the distributions below are
// hand-rolled, so a given seed produces the same stream on every platform.
// Every normal() consumes exactly two engine draws; uniform() consumes one.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; used where log(u) must stay finite.
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch).
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_index: n must be positive");
    const std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Independent stream for a named stage, derived from the construction seed
  // (not the current engine state).
  Rng substream(std::string_view label) const {
    return Rng(derive_seed(seed_, label));
  }

  Rng substream(std::string_view label, std::uint64_t index) const {
    return Rng(derive_seed(seed_, label, index));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace pmog
