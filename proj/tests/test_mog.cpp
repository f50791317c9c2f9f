#include "pmog/mog.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace pmog;

namespace {

constexpr double kGaussianEntropy = 1.4189385332046727;  // 0.5 log(2 pi e)
constexpr double kChi2_49_999 = 85.35056460859305;

CenterSet centers_fixture(int n, int d, double gamma, std::uint64_t seed) {
  return place_centers(EmbeddingVector::Zero(d), simplex_directions(n, d), gamma, seed);
}

}  // namespace

TEST_CASE("component spread scales with radius over sqrt dimension") {
  CenterSet a = centers_fixture(3, 4, 2.0, 0);
  REQUIRE(build_mog(a, 0.5).sigma == Catch::Approx(0.5).epsilon(1e-12));

  CenterSet b = centers_fixture(50, 4096, 0.775, 0);
  REQUIRE(build_mog(b, 0.25).sigma == Catch::Approx(0.00302734375).epsilon(1e-12));

  CenterSet c = centers_fixture(3, 4, 0.0, 0);
  REQUIRE(build_mog(c, 0.25).sigma == 0.0);

  REQUIRE_THROWS_AS(build_mog(a, 0.0), DomainError);
  REQUIRE_THROWS_AS(build_mog(a, -1.0), DomainError);
}

TEST_CASE("degenerate mixture returns centers exactly") {
  MoGModel model;
  model.centers = centers_fixture(4, 6, 1.5, 2).centers;
  model.sigma = 0.0;
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    auto [sample, idx] = sample_mog(model, rng);
    REQUIRE((sample.transpose() - model.centers.row(idx)).norm() == 0.0);
  }
}

TEST_CASE("single-component sample mean converges to the center") {
  MoGModel model;
  model.centers = Matrix(1, 3);
  model.centers << 1.0, -2.0, 0.5;
  model.sigma = 1.0;
  Rng rng(4);
  const int n = 100000;
  EmbeddingVector mean = EmbeddingVector::Zero(3);
  for (int i = 0; i < n; ++i) {
    auto [sample, idx] = sample_mog(model, rng);
    REQUIRE(idx == 0);
    mean += sample;
  }
  mean /= n;
  const double bound = 4.0 * model.sigma / std::sqrt(static_cast<double>(n));
  for (int c = 0; c < 3; ++c)
    REQUIRE(std::abs(mean[c] - model.centers(0, c)) < bound);
}

TEST_CASE("component choice is uniform") {
  MoGModel model;
  model.centers = Matrix::Zero(50, 2);
  model.sigma = 0.1;
  Rng rng(15);
  std::vector<long> counts(50, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_mog(model, rng).second];
  const double expected = n / 50.0;
  double stat = 0.0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  REQUIRE(stat < kChi2_49_999);
}

TEST_CASE("per-component moments match the isotropic law") {
  MoGModel model;
  model.centers = centers_fixture(3, 3, 2.0, 5).centers;
  model.sigma = 0.7;
  Rng rng(21);
  const int n = 150000;
  std::vector<Matrix> sums(3, Matrix::Zero(1, 3));
  std::vector<Matrix> outer(3, Matrix::Zero(3, 3));
  std::vector<long> counts(3, 0);
  for (int i = 0; i < n; ++i) {
    auto [sample, idx] = sample_mog(model, rng);
    Eigen::RowVector3d centered = sample.transpose() - model.centers.row(idx);
    sums[idx] += centered;
    outer[idx] += centered.transpose() * centered;
    ++counts[idx];
  }
  for (int k = 0; k < 3; ++k) {
    const double m = static_cast<double>(counts[k]);
    Matrix mean = sums[k] / m;
    Matrix cov = outer[k] / m;
    const double rate = 5.0 * model.sigma / std::sqrt(m);
    REQUIRE(mean.cwiseAbs().maxCoeff() < rate);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double expected = (i == j) ? model.sigma * model.sigma : 0.0;
        REQUIRE(cov(i, j) == Catch::Approx(expected).margin(5.0 * rate));
      }
  }
}

TEST_CASE("one-dimensional entropy of a single Gaussian") {
  EntropyReport report = mog_entropy_1d(1, 1.0, 6.0);
  REQUIRE(report.h_mix == Catch::Approx(kGaussianEntropy).epsilon(1e-6));
  REQUIRE(report.component_entropies.size() == 1);
  REQUIRE(report.component_entropies[0] == Catch::Approx(kGaussianEntropy));
  REQUIRE(report.mutual_information == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("four well-separated components approach h plus log 4") {
  EntropyReport report = mog_entropy_1d(4, 1.0, 6.0);
  const double theory = kGaussianEntropy + std::log(4.0);
  REQUIRE(report.theoretical == Catch::Approx(theory).epsilon(1e-12));
  REQUIRE(std::abs(report.h_mix - theory) / report.h_mix < 0.01);
  // Independent quadrature oracle (adaptive Gauss-Kronrod) for the same mixture.
  REQUIRE(report.h_mix == Catch::Approx(2.799459023028262).epsilon(1e-6));
}

TEST_CASE("coincident components collapse to one Gaussian") {
  EntropyReport report = mog_entropy_1d(2, 1.0, 0.0);
  REQUIRE(report.h_mix == Catch::Approx(kGaussianEntropy).epsilon(1e-6));
  REQUIRE(report.mutual_information == Catch::Approx(0.0).margin(1e-5));
}

TEST_CASE("entropy increases monotonically with the component count") {
  double prev = -1e9;
  for (int n = 1; n <= 10; ++n) {
    EntropyReport report = mog_entropy_1d(n, 1.0, 6.0);
    REQUIRE(report.h_mix > prev);
    if (n > 1) {
      const double diff = report.h_mix - prev;
      const double expected = std::log(n / (n - 1.0));
      REQUIRE(std::abs(diff - expected) / expected < 0.01);
    }
    prev = report.h_mix;
  }
}

TEST_CASE("restricting a disjoint mixture lowers entropy by log(n/k)") {
  const double h8 = mog_entropy_1d(8, 1.0, 6.0).h_mix;
  for (int k : {1, 2, 4}) {
    const double hk = mog_entropy_1d(k, 1.0, 6.0).h_mix;
    REQUIRE(h8 - hk == Catch::Approx(std::log(8.0 / k)).epsilon(0.01));
    REQUIRE(hk < h8);
  }
}

TEST_CASE("entropy estimators reject invalid inputs") {
  REQUIRE_THROWS_AS(mog_entropy_1d(0, 1.0, 6.0), DomainError);
  REQUIRE_THROWS_AS(mog_entropy_1d(2, 0.0, 6.0), DomainError);
  MoGModel degenerate;
  degenerate.centers = Matrix::Zero(2, 2);
  degenerate.sigma = 0.0;
  Rng rng(0);
  REQUIRE_THROWS_AS(mog_entropy_mc(degenerate, 10000, rng), DomainError);
  MoGModel ok;
  ok.centers = Matrix::Zero(1, 2);
  ok.sigma = 1.0;
  REQUIRE_THROWS_AS(mog_entropy_mc(ok, 10, rng), DomainError);
}

TEST_CASE("Monte-Carlo entropy of a 2D Gaussian") {
  MoGModel model;
  model.centers = Matrix::Zero(1, 2);
  model.sigma = 1.0;
  Rng rng(33);
  EntropyReport report = mog_entropy_mc(model, 100000, rng);
  const double truth = std::log(2.0 * std::numbers::pi * std::numbers::e);
  REQUIRE(report.std_error > 0.0);
  REQUIRE(std::abs(report.h_mix - truth) < 3.0 * report.std_error);
}

TEST_CASE("Monte-Carlo entropy of four disjoint 2D components") {
  MoGModel model;
  model.centers = Matrix(4, 2);
  model.centers << 0, 0, 12, 0, 0, 12, 12, 12;  // 12 sigma apart
  model.sigma = 1.0;
  Rng rng(44);
  EntropyReport report = mog_entropy_mc(model, 100000, rng);
  const double truth = std::log(2.0 * std::numbers::pi * std::numbers::e) + std::log(4.0);
  REQUIRE(std::abs(report.h_mix - truth) < 3.0 * report.std_error);
  REQUIRE(std::abs(report.mutual_information - std::log(4.0)) < 3.0 * report.std_error);
  REQUIRE(report.theoretical == Catch::Approx(truth).epsilon(1e-12));
}

TEST_CASE("decomposition stays within the mutual-information bounds") {
  for (double delta : {0.0, 2.0, 6.0, 9.0}) {
    EntropyReport report = mog_entropy_1d(5, 1.0, delta);
    REQUIRE(report.mutual_information >= -1e-5);
    REQUIRE(report.mutual_information <= std::log(5.0) + 1e-5);
  }
  REQUIRE(mog_entropy_1d(5, 1.0, 6.0).mutual_information ==
          Catch::Approx(std::log(5.0)).epsilon(0.01));
  REQUIRE(mog_entropy_1d(5, 1.0, 0.0).mutual_information ==
          Catch::Approx(0.0).margin(1e-5));
}

// The two estimators are independent routes to the same quantity; for a 1D
// model they must agree within the Monte-Carlo error.
TEST_CASE("Monte-Carlo and quadrature entropies agree in 1D") {
  const double sigma = 0.8, delta = 2.0;  // overlapping components
  MoGModel model;
  model.centers = Matrix(3, 1);
  model.centers << 0.0, delta, 2.0 * delta;
  model.sigma = sigma;
  Rng rng(66);
  EntropyReport mc = mog_entropy_mc(model, 100000, rng);
  EntropyReport quad = mog_entropy_1d(3, sigma, delta);
  REQUIRE(std::abs(mc.h_mix - quad.h_mix) < 3.0 * mc.std_error);
}

TEST_CASE("theoretical entropy formula") {
  REQUIRE(theoretical_entropy(1, 1.0) == Catch::Approx(kGaussianEntropy).epsilon(1e-12));
  REQUIRE(theoretical_entropy(10, 1.0) == Catch::Approx(3.7215236261987186).epsilon(1e-12));
  for (int n : {1, 3, 9}) {
    REQUIRE(theoretical_entropy(2 * n, 0.3) - theoretical_entropy(n, 0.3) ==
            Catch::Approx(std::log(2.0)).epsilon(1e-12));
  }
}
