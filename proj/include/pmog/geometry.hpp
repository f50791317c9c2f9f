#pragma once

#include "pmog/common.hpp"
#include "pmog/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <string>

namespace pmog {

// n unit directions in d dimensions with equal pairwise inner products
// -1/(n-1): the vertex directions of a regular simplex, zero-padded to d.
struct SimplexFrame {
  Matrix directions;  // n x d, unit rows
  int n = 0;
  int d = 0;
};

// n points on the sphere of radius gamma_euc around a base embedding, with
// offset inner products -gamma_euc^2/(n-1).
struct CenterSet {
  Matrix centers;  // n x dim(base)
  EmbeddingVector base;
  double gamma_euc = 0.0;
};

// Centered configuration before row normalization: the n rows of the first
// n-1 right singular vectors of the centering matrix I - (1/n) 11^T.
// Each row has squared norm (n-1)/n and the rows sum to zero.
inline Matrix simplex_centered_configuration(int n) {
  if (n < 2) throw DomainError("simplex: need at least 2 vertices, got " + std::to_string(n));
  Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Eigen::JacobiSVD<Matrix> svd(centering, Eigen::ComputeFullV);
  Matrix config = svd.matrixV().leftCols(n - 1);
  // Canonical column signs (first nonzero entry positive). Column sign flips
  // leave all pairwise row inner products unchanged.
  for (Eigen::Index j = 0; j < config.cols(); ++j) {
    for (Eigen::Index i = 0; i < config.rows(); ++i) {
      const double v = config(i, j);
      if (v != 0.0) {
        if (v < 0.0) config.col(j) = -config.col(j);
        break;
      }
    }
  }
  return config;
}

inline SimplexFrame simplex_directions(int n, int d) {
  if (n < 2) throw DomainError("simplex_directions: n must be >= 2, got " + std::to_string(n));
  if (d < n - 1)
    throw DimensionError("simplex_directions: d must be >= n-1 (n=" + std::to_string(n) +
                         ", d=" + std::to_string(d) + ")");
  Matrix config = simplex_centered_configuration(n);
  SimplexFrame frame;
  frame.n = n;
  frame.d = d;
  frame.directions = Matrix::Zero(n, d);
  for (int i = 0; i < n; ++i)
    frame.directions.row(i).head(n - 1) = config.row(i) / config.row(i).norm();
  return frame;
}

// d x k matrix with orthonormal columns, Haar-distributed on the Stiefel
// manifold: QR of a seeded Gaussian matrix with the R diagonal forced
// positive. Only k columns are materialized, never a full d x d matrix.
inline Matrix random_rotation(int d, int k, std::uint64_t seed) {
  if (d < 1 || k < 1)
    throw DomainError("random_rotation: dimensions must be positive");
  if (k > d)
    throw DimensionError("random_rotation: k=" + std::to_string(k) +
                         " exceeds d=" + std::to_string(d));
  Rng rng(seed);
  Matrix gauss = rng.normal_matrix(d, k);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  for (int j = 0; j < k; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

enum class GammaMode { Standard, Literal };

// Converts a cosine-similarity threshold to the Euclidean radius of the
// feasible sphere. Standard mode uses the chord length between equal-norm
// vectors at cosine gamma_sim: |e| * sqrt(2 (1 - gamma_sim)). Literal mode
// evaluates |e| * sqrt(1 - 2 gamma_sim) as published, which has a negative
// radicand precisely at the commonly used thresholds above 0.5.
inline double gamma_sim_to_euc(double gamma_sim, double base_norm, GammaMode mode) {
  if (!(base_norm > 0.0))
    throw DomainError("gamma_sim_to_euc: base_norm must be positive");
  if (!(gamma_sim > -1.0 && gamma_sim <= 1.0))
    throw DomainError("gamma_sim_to_euc: gamma_sim must lie in (-1, 1], got " +
                      std::to_string(gamma_sim));
  if (mode == GammaMode::Literal) {
    if (gamma_sim > 0.5)
      throw NegativeRadicandError(
          "gamma_sim_to_euc: literal formula sqrt(1 - 2*gamma_sim) has a negative "
          "radicand for gamma_sim = " + std::to_string(gamma_sim) +
          " > 0.5; the stock similarity thresholds (e.g. 0.7) are incompatible "
          "with the literal conversion. Use standard (chord-length) mode.");
    return base_norm * std::sqrt(1.0 - 2.0 * gamma_sim);
  }
  return base_norm * std::sqrt(2.0 * (1.0 - gamma_sim));
}

// Places the simplex directions on the sphere of radius gamma_euc around the
// base embedding. The rotation acts on the (n-1)-dimensional simplex
// coordinates, which is equivalent to zero-padding followed by a full
// rotation of the ambient space.
inline CenterSet place_centers(const EmbeddingVector& base, const SimplexFrame& frame,
                               double gamma_euc, std::uint64_t seed) {
  const auto dim = static_cast<int>(base.size());
  if (dim < 1) throw DimensionError("place_centers: empty base embedding");
  if (frame.d > dim)
    throw DimensionError("place_centers: frame dimension " + std::to_string(frame.d) +
                         " exceeds base dimension " + std::to_string(dim));
  if (frame.n - 1 > dim)
    throw DimensionError("place_centers: " + std::to_string(frame.n) +
                         " centers need base dimension >= " + std::to_string(frame.n - 1));
  if (gamma_euc < 0.0) throw DomainError("place_centers: gamma_euc must be nonnegative");

  Matrix rotation = random_rotation(dim, frame.n - 1, seed);  // dim x (n-1)
  Matrix simplex_coords = frame.directions.leftCols(frame.n - 1);
  CenterSet set;
  set.base = base;
  set.gamma_euc = gamma_euc;
  set.centers = (gamma_euc * simplex_coords * rotation.transpose()).rowwise() +
                base.transpose();
  return set;
}

}  // namespace pmog
