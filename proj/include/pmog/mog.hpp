#pragma once

#include "pmog/common.hpp"
#include "pmog/geometry.hpp"
#include "pmog/rng.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace pmog {

// Uniform-weight mixture of isotropic Gaussians. sigma = 0 is admitted as a
// degenerate point-mass mixture; density-based operations reject it.
struct MoGModel {
  Matrix centers;  // n x d
  double sigma = 0.0;

  int component_count() const { return static_cast<int>(centers.rows()); }
  int dim() const { return static_cast<int>(centers.cols()); }
};

struct EntropyReport {
  double h_mix = 0.0;                       // nats
  std::vector<double> component_entropies;  // nats
  double mutual_information = 0.0;          // h_mix - mean(component entropies)
  double theoretical = 0.0;                 // h + log n under disjoint support
  double std_error = 0.0;                   // 0 for quadrature estimates
};

// Differential entropy of a 1D Gaussian, 0.5 log(2 pi e sigma^2).
inline double gaussian_entropy_1d(double sigma) {
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * sigma * sigma);
}

// h + log n: the mixture entropy when the n components are disjoint.
inline double theoretical_entropy(int n, double sigma) {
  if (n < 1) throw DomainError("theoretical_entropy: n must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("theoretical_entropy: sigma must be positive");
  return gaussian_entropy_1d(sigma) + std::log(static_cast<double>(n));
}

// The component spread scales with the placement radius and shrinks with the
// ambient dimension: sigma = sigma_base * gamma_euc / sqrt(d).
inline MoGModel build_mog(const CenterSet& centers, double sigma_base) {
  if (!(sigma_base > 0.0))
    throw DomainError("build_mog: sigma_base must be positive, got " +
                      std::to_string(sigma_base));
  MoGModel model;
  model.centers = centers.centers;
  model.sigma = sigma_base * centers.gamma_euc /
                std::sqrt(static_cast<double>(centers.centers.cols()));
  return model;
}

// One mixture draw: uniform component index, then center + sigma * z.
inline std::pair<EmbeddingVector, int> sample_mog(const MoGModel& model, Rng& rng) {
  const int n = model.component_count();
  if (n < 1) throw DomainError("sample_mog: empty model");
  const int idx = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  EmbeddingVector z = rng.normal_vector(model.dim());
  EmbeddingVector sample = model.centers.row(idx).transpose() + model.sigma * z;
  return {std::move(sample), idx};
}

namespace detail {

// Composite adaptive Simpson. The initial range is split into panels so no
// mixture bump can hide inside a single converged estimate; each panel is
// then subdivided until the standard Richardson criterion meets eps.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double eps_abs, int initial_panels) {
  auto simpson = [](double lo, double flo, double hi, double fhi, double fmid) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  };
  std::function<double(double, double, double, double, double, double, double, int)>
      recurse = [&](double lo, double flo, double hi, double fhi, double fmid,
                    double whole, double eps, int depth) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(lo, flo, mid, fmid, flm);
    const double right = simpson(mid, fmid, hi, fhi, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    if (depth >= 48)
      throw NumericalError("adaptive_simpson: tolerance not met at max depth");
    return recurse(lo, flo, mid, fmid, flm, left, 0.5 * eps, depth + 1) +
           recurse(mid, fmid, hi, fhi, frm, right, 0.5 * eps, depth + 1);
  };

  double total = 0.0;
  const double panel = (b - a) / initial_panels;
  const double panel_eps = eps_abs / initial_panels;
  for (int p = 0; p < initial_panels; ++p) {
    const double lo = a + p * panel;
    const double hi = (p + 1 == initial_panels) ? b : a + (p + 1) * panel;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fhi = f(hi), fmid = f(mid);
    const double whole = simpson(lo, flo, hi, fhi, fmid);
    total += recurse(lo, flo, hi, fhi, fmid, whole, panel_eps, 0);
  }
  return total;
}

inline double mixture_density_1d(double x, const std::vector<double>& means,
                                 double sigma) {
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double p = 0.0;
  for (double mu : means) {
    const double z = (x - mu) / sigma;
    p += norm * std::exp(-0.5 * z * z);
  }
  return p / static_cast<double>(means.size());
}

inline double mixture_entropy_integral(const std::vector<double>& means, double sigma) {
  double lo = means.front(), hi = means.front();
  for (double mu : means) {
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
  }
  lo -= 10.0 * sigma;
  hi += 10.0 * sigma;
  auto integrand = [&](double x) {
    const double p = mixture_density_1d(x, means, sigma);
    return p > 0.0 ? -p * std::log(p) : 0.0;  // 0 log 0 = 0
  };
  // Rough composite pass fixes the scale for the relative tolerance.
  const int coarse = 512;
  double rough = 0.0;
  for (int i = 0; i < coarse; ++i) {
    const double x0 = lo + (hi - lo) * i / coarse;
    const double x1 = lo + (hi - lo) * (i + 1) / coarse;
    rough += 0.5 * (integrand(x0) + integrand(x1)) * (x1 - x0);
  }
  const double eps_abs = 1e-6 * std::max(std::abs(rough), 1e-3);
  const int panels = std::max(64, 8 * static_cast<int>(means.size()));
  return adaptive_simpson(integrand, lo, hi, eps_abs, panels);
}

}  // namespace detail

// Entropy of the 1D mixture with n components spaced by delta, estimated by
// numerical integration of -p log p (relative error <= 1e-6).
inline EntropyReport mog_entropy_1d(int n, double sigma, double delta) {
  if (n < 1) throw DomainError("mog_entropy_1d: n must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("mog_entropy_1d: sigma must be positive");
  std::vector<double> means(n);
  for (int k = 0; k < n; ++k) means[k] = k * delta;

  EntropyReport report;
  report.h_mix = detail::mixture_entropy_integral(means, sigma);
  report.component_entropies.assign(n, gaussian_entropy_1d(sigma));
  report.mutual_information = report.h_mix - gaussian_entropy_1d(sigma);
  report.theoretical = theoretical_entropy(n, sigma);
  report.std_error = 0.0;
  return report;
}

// Plug-in Monte-Carlo estimate for d >= 1: h = -(1/N) sum log p(x_k) over N
// mixture draws, with the exact mixture log-density evaluated by log-sum-exp.
inline EntropyReport mog_entropy_mc(const MoGModel& model, int sample_count, Rng& rng) {
  if (sample_count < 1000)
    throw DomainError("mog_entropy_mc: need at least 1000 samples");
  if (!(model.sigma > 0.0))
    throw DomainError("mog_entropy_mc: degenerate model (sigma = 0) has no density");
  const int n = model.component_count();
  const int d = model.dim();
  const double log_norm = -std::log(static_cast<double>(n)) -
                          d * std::log(model.sigma) -
                          0.5 * d * std::log(2.0 * std::numbers::pi);
  const double inv_two_sigma2 = 1.0 / (2.0 * model.sigma * model.sigma);

  double sum = 0.0, sum_sq = 0.0;
  Eigen::VectorXd sq_dists(n);
  for (int k = 0; k < sample_count; ++k) {
    auto [x, idx] = sample_mog(model, rng);
    for (int j = 0; j < n; ++j)
      sq_dists[j] = (x.transpose() - model.centers.row(j)).squaredNorm();
    const double m = -inv_two_sigma2 * sq_dists.minCoeff();
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += std::exp(-inv_two_sigma2 * sq_dists[j] - m);
    const double neg_log_p = -(log_norm + m + std::log(acc));
    sum += neg_log_p;
    sum_sq += neg_log_p * neg_log_p;
  }
  const double mean = sum / sample_count;
  const double var = std::max(0.0, sum_sq / sample_count - mean * mean);

  const double component_entropy = d * gaussian_entropy_1d(model.sigma);
  EntropyReport report;
  report.h_mix = mean;
  report.component_entropies.assign(n, component_entropy);
  report.mutual_information = mean - component_entropy;
  report.theoretical = component_entropy + std::log(static_cast<double>(n));
  report.std_error = std::sqrt(var / sample_count);
  return report;
}

}  // namespace pmog
