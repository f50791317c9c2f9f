#pragma once

#include "pmog/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace pmog {

// Symmetric similarity matrix with unit diagonal.
struct KernelMatrix {
  Matrix values;

  int size() const { return static_cast<int>(values.rows()); }
};

struct VendiResult {
  double score = 0.0;
  Eigen::VectorXd eigenvalues;  // of K/m, descending
};

// K_ij = cosine similarity of feature rows i and j.
inline KernelMatrix cosine_kernel(const Matrix& features) {
  const auto m = features.rows();
  if (m < 1) throw DomainError("cosine_kernel: empty feature set");
  Eigen::VectorXd norms(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    norms[i] = features.row(i).norm();
    if (!(norms[i] > 0.0))
      throw DomainError("cosine_kernel: zero-norm feature row at index " +
                        std::to_string(i));
  }
  KernelMatrix kernel;
  kernel.values.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    kernel.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      double c = features.row(i).dot(features.row(j)) / (norms[i] * norms[j]);
      c = std::clamp(c, -1.0, 1.0);
      kernel.values(i, j) = kernel.values(j, i) = c;
    }
  }
  return kernel;
}

inline double median_pairwise_distance(const Matrix& features) {
  const auto m = features.rows();
  if (m < 2)
    throw DomainError("median_pairwise_distance: need at least 2 samples");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      dists.push_back((features.row(i) - features.row(j)).norm());
  const auto mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return dists[mid];
}

// K_ij = exp(-|x_i - x_j|^2 / (2 l^2)). Without an explicit lengthscale the
// median pairwise distance is used.
inline KernelMatrix rbf_kernel(const Matrix& features,
                               std::optional<double> lengthscale = std::nullopt) {
  const auto m = features.rows();
  if (m < 1) throw DomainError("rbf_kernel: empty feature set");
  double scale;
  if (lengthscale) {
    scale = *lengthscale;
    if (!(scale > 0.0)) throw DomainError("rbf_kernel: lengthscale must be positive");
  } else {
    scale = median_pairwise_distance(features);
    if (!(scale > 0.0))
      throw DomainError("rbf_kernel: all points coincide, median lengthscale degenerate");
  }
  const double inv = 1.0 / (2.0 * scale * scale);
  KernelMatrix kernel;
  kernel.values.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    kernel.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double sq = (features.row(i) - features.row(j)).squaredNorm();
      kernel.values(i, j) = kernel.values(j, i) = std::exp(-inv * sq);
    }
  }
  return kernel;
}

// exp of the Shannon entropy of the spectrum of K/m: the effective number of
// distinct samples, in [1, m]. Eigenvalues below 1e-12 are treated as zero;
// negatives down to -1e-8 are clipped as floating-point PSD drift.
inline VendiResult vendi_result(const KernelMatrix& kernel) {
  const auto m = kernel.values.rows();
  if (m < 1) throw DomainError("vendi_score: empty kernel");
  if (kernel.values.cols() != m)
    throw DimensionError("vendi_score: kernel matrix must be square");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(kernel.values(i, i) - 1.0) > 1e-12)
      throw DomainError("vendi_score: kernel diagonal must be 1 (row " +
                        std::to_string(i) + ")");
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (std::abs(kernel.values(i, j) - kernel.values(j, i)) > 1e-12)
        throw DomainError("vendi_score: kernel matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(kernel.values / static_cast<double>(m),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("vendi_score: eigensolver failed to converge");
  Eigen::VectorXd lambda = solver.eigenvalues();
  if (lambda.minCoeff() < -1e-8)
    throw DomainError("vendi_score: kernel is not positive semidefinite (min "
                      "eigenvalue " + std::to_string(lambda.minCoeff()) + ")");

  double entropy = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double v = lambda[i];
    if (v < 1e-12) {
      lambda[i] = std::max(v, 0.0);
      continue;  // 0 log 0 = 0
    }
    entropy -= v * std::log(v);
  }
  VendiResult result;
  result.score = std::exp(entropy);
  result.eigenvalues = lambda.reverse();
  return result;
}

inline double vendi_score(const KernelMatrix& kernel) {
  return vendi_result(kernel).score;
}

}  // namespace pmog
