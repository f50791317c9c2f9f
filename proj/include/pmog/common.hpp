#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pmog {

using EmbeddingVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error hierarchy. The CLI maps DomainError (and subclasses) to exit code 3
// and NumericalError to exit code 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class DimensionError : public DomainError {
 public:
  explicit DimensionError(const std::string& msg) : DomainError(msg) {}
};

class NegativeRadicandError : public DomainError {
 public:
  explicit NegativeRadicandError(const std::string& msg) : DomainError(msg) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named substream derivation: each pipeline stage draws from its own seed so
// changing one stage's draw count cannot shift another's stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ fnv1a64(label));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(seed, label) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace pmog
