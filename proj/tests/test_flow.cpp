#include "pmog/flow.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace pmog;

namespace {

constexpr double kChi2_7_999 = 24.321886347856854;

ToyDatasetSpec small_spec() {
  ToyDatasetSpec spec;
  spec.cluster_count = 8;
  spec.radius = 1.0;
  spec.cluster_std = 0.05;
  spec.cond_dim = 8;
  spec.seed = 11;
  return spec;
}

TrainConfig small_config() {
  TrainConfig config;
  config.hidden = {32, 32};
  config.steps = 1200;
  config.batch_size = 128;
  config.heldout_size = 256;
  return config;
}

}  // namespace

TEST_CASE("tiny cluster spread pins points to the centers") {
  ToyDatasetSpec spec = small_spec();
  spec.cluster_std = 1e-12;
  Rng rng(1);
  ToyDataset data = make_dataset(spec, 500, rng);
  for (const auto& s : data.samples)
    REQUIRE((s.point - data.world.cluster_centers[s.cluster]).norm() < 1e-9);
}

TEST_CASE("cluster assignment is uniform") {
  Rng rng(2);
  ToyDataset data = make_dataset(small_spec(), 10000, rng);
  std::vector<long> counts(8, 0);
  for (const auto& s : data.samples) ++counts[s.cluster];
  const double expected = 10000.0 / 8.0;
  double stat = 0.0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  REQUIRE(stat < kChi2_7_999);
}

TEST_CASE("coarse codes split the ring into two sectors") {
  ToyWorld world = ToyWorld::create(small_spec());
  const ConditioningCode first = world.coarse_code(0);
  for (int k = 0; k < 4; ++k) {
    REQUIRE(world.sector_of(k) == 0);
    REQUIRE((world.coarse_code(world.sector_of(k)).values - first.values).norm() == 0.0);
  }
  for (int k = 4; k < 8; ++k) {
    REQUIRE(world.sector_of(k) == 1);
    REQUIRE((world.coarse_code(world.sector_of(k)).values - first.values).norm() > 0.1);
  }
}

TEST_CASE("fine codes separate clusters and pin feasibility") {
  ToyWorld world = ToyWorld::create(small_spec());
  for (int a = 0; a < 8; ++a) {
    const ConditioningCode code = world.fine_code(a);
    REQUIRE(code.cluster == a);
    REQUIRE(world.feasible_clusters(code) == std::vector<int>{a});
    for (int b = a + 1; b < 8; ++b)
      REQUIRE((code.values - world.fine_code(b).values).norm() > 0.1);
  }
  REQUIRE(world.feasible_clusters(world.coarse_code(1)) ==
          std::vector<int>({4, 5, 6, 7}));
}

TEST_CASE("constant velocity field telescopes exactly") {
  // A model with no hidden layers, zero weights and bias a is the constant
  // field v = a; the descending Euler sum then gives x0 = x1 - a.
  FlowModel model = init_flow_model(4, {}, 0);
  REQUIRE(model.layers.size() == 1);
  model.layers[0].w.setZero();
  model.layers[0].b << 0.3, -1.1;
  const ConditioningCode cond{EmbeddingVector::Zero(4),
                              ConditioningCode::Specificity::Fine, 0, 0};
  const Eigen::Vector2d a(0.3, -1.1);
  for (int steps : {1, 7, 100}) {
    Rng rng(5);
    const Eigen::Vector2d x0 = euler_sample(model, cond, steps, rng);
    Rng replay(5);
    const double zx = replay.normal();
    const double zy = replay.normal();
    const Eigen::Vector2d x1(zx, zy);
    REQUIRE((x0 - (x1 - a)).norm() < 1e-12);
  }
}

TEST_CASE("euler error on an affine field shrinks at first order") {
  const Eigen::Vector2d a(0.5, -0.3), b(0.2, -0.1);
  auto field = [&](const Eigen::Vector2d& x, double) -> Eigen::Vector2d {
    return a.cwiseProduct(x) + b;
  };
  const Eigen::Vector2d x1(0.7, -1.4);
  // The descending grid integrates dy/ds = -(a y + b) for unit time.
  Eigen::Vector2d exact;
  for (int i = 0; i < 2; ++i)
    exact[i] = (x1[i] + b[i] / a[i]) * std::exp(-a[i]) - b[i] / a[i];

  double prev_err = -1.0;
  for (int steps : {8, 16, 32, 64, 128}) {
    const double err = (euler_integrate(field, x1, steps) - exact).norm();
    if (prev_err > 0.0) {
      const double ratio = prev_err / err;
      REQUIRE(ratio > 1.5);
      REQUIRE(ratio < 2.5);
    }
    prev_err = err;
  }
  REQUIRE_THROWS_AS(euler_integrate(field, x1, 0), DomainError);
}

TEST_CASE("analytic gradients match central differences at initialization") {
  FlowModel model = init_flow_model(6, {12, 12}, 3);
  REQUIRE(gradient_check(model, 1e-5) < 1e-4);
}

TEST_CASE("gradients of a zero model on a zero batch are zero") {
  FlowModel model = init_flow_model(4, {8}, 0);
  for (auto& layer : model.layers) {
    layer.w.setZero();
    layer.b.setZero();
  }
  Matrix inputs = Matrix::Zero(4, model.input_dim());
  Matrix targets = Matrix::Zero(4, 2);
  REQUIRE(gradient_check_on(model, inputs, targets, 1e-5) == 0.0);
}

TEST_CASE("gradient check still passes after a short training run") {
  Rng data_rng(9);
  ToyDataset data = make_dataset(small_spec(), 1024, data_rng);
  TrainConfig config = small_config();
  config.steps = 300;
  Rng train_rng(10);
  FlowModel model = train_velocity_field(data, config, train_rng);
  REQUIRE(gradient_check(model, 1e-5) < 1e-4);
}

TEST_CASE("gradient check validates eps") {
  FlowModel model = init_flow_model(4, {8}, 0);
  REQUIRE_THROWS_AS(gradient_check(model, 1e-2), DomainError);
}

TEST_CASE("zero training steps return the initialization") {
  Rng data_rng(12);
  ToyDataset data = make_dataset(small_spec(), 256, data_rng);
  TrainConfig config = small_config();
  config.steps = 0;
  Rng train_rng(77);
  FlowModel model = train_velocity_field(data, config, train_rng);

  const std::uint64_t init_seed = Rng(77).substream("init").next_u64();
  FlowModel expected = init_flow_model(small_spec().cond_dim, config.hidden, init_seed);
  REQUIRE(model.layers.size() == expected.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    REQUIRE(model.layers[l].w.cwiseEqual(expected.layers[l].w).all());
    REQUIRE(model.layers[l].b.cwiseEqual(expected.layers[l].b).all());
  }
}

TEST_CASE("training improves the held-out loss") {
  Rng data_rng(13);
  ToyDataset data = make_dataset(small_spec(), 2048, data_rng);
  Rng train_rng(14);
  FlowModel model = train_velocity_field(data, small_config(), train_rng);
  REQUIRE(model.heldout_loss_final < model.heldout_loss_initial);
  REQUIRE_FALSE(model.loss_history.empty());
}

TEST_CASE("training on a point mass concentrates the sampler") {
  ToyDatasetSpec spec = small_spec();
  spec.radius = 0.0;          // every cluster center at the origin
  spec.cluster_std = 1e-6;
  Rng data_rng(15);
  ToyDataset data = make_dataset(spec, 1024, data_rng);
  TrainConfig config = small_config();
  config.steps = 2500;
  Rng train_rng(16);
  FlowModel model = train_velocity_field(data, config, train_rng);

  Rng sample_rng(17);
  const ConditioningCode cond = data.world.fine_code(0);
  double mean_norm = 0.0;
  for (int i = 0; i < 200; ++i)
    mean_norm += euler_sample(model, cond, 28, sample_rng).norm();
  mean_norm /= 200.0;
  REQUIRE(mean_norm < 0.1);
}

TEST_CASE("non-finite training loss raises a numerical error") {
  Rng data_rng(18);
  ToyDataset data = make_dataset(small_spec(), 128, data_rng);
  TrainConfig config = small_config();
  config.steps = 5;
  config.learning_rate = std::numeric_limits<double>::quiet_NaN();
  Rng train_rng(19);
  REQUIRE_THROWS_AS(train_velocity_field(data, config, train_rng), NumericalError);
}

TEST_CASE("sampling is bitwise deterministic per seed") {
  Rng data_rng(20);
  ToyDataset data = make_dataset(small_spec(), 256, data_rng);
  TrainConfig config = small_config();
  config.steps = 100;
  Rng train_rng(21);
  FlowModel model = train_velocity_field(data, config, train_rng);
  const ConditioningCode cond = data.world.fine_code(2);
  Rng a(100), b(100);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector2d xa = euler_sample(model, cond, 28, a);
    const Eigen::Vector2d xb = euler_sample(model, cond, 28, b);
    REQUIRE((xa - xb).norm() == 0.0);
  }
}

TEST_CASE("degenerate mixture settings reproduce the baseline bit for bit") {
  Rng data_rng(22);
  ToyDataset data = make_dataset(small_spec(), 512, data_rng);
  TrainConfig config = small_config();
  config.steps = 200;
  Rng train_rng(23);
  FlowModel model = train_velocity_field(data, config, train_rng);

  ExperimentConfig experiment;
  experiment.samples = 60;
  experiment.flow_steps = 8;
  experiment.seeds = {5, 6};

  MethodSpec baseline;
  baseline.method = SamplingMethod::Baseline;
  MethodSpec degenerate;
  degenerate.method = SamplingMethod::PromptMog;
  degenerate.gamma_sim = 1.0;  // zero radius
  degenerate.sigma_base = 0.0;
  degenerate.n_modes = 5;

  const ConditioningCode base = data.world.fine_code(1);
  ExperimentReport a = diversity_experiment(model, data.world, base, baseline, experiment);
  ExperimentReport b = diversity_experiment(model, data.world, base, degenerate, experiment);
  REQUIRE(a.per_seed.size() == b.per_seed.size());
  for (std::size_t s = 0; s < a.per_seed.size(); ++s) {
    REQUIRE(a.per_seed[s].points.cwiseEqual(b.per_seed[s].points).all());
    REQUIRE(a.per_seed[s].vendi == b.per_seed[s].vendi);
    REQUIRE(a.per_seed[s].off_support_frac == b.per_seed[s].off_support_frac);
  }
}

TEST_CASE("experiment validates inputs") {
  Rng data_rng(24);
  ToyDataset data = make_dataset(small_spec(), 128, data_rng);
  TrainConfig config = small_config();
  config.steps = 10;
  Rng train_rng(25);
  FlowModel model = train_velocity_field(data, config, train_rng);
  ExperimentConfig experiment;
  experiment.samples = 10;  // below the minimum
  REQUIRE_THROWS_AS(diversity_experiment(model, data.world, data.world.fine_code(0),
                                         MethodSpec{}, experiment),
                    DomainError);
}

TEST_CASE("dataset spec validation") {
  ToyDatasetSpec spec = small_spec();
  spec.cluster_count = 1;
  REQUIRE_THROWS_AS(ToyWorld::create(spec), DomainError);
  spec = small_spec();
  spec.cluster_std = 0.0;
  REQUIRE_THROWS_AS(ToyWorld::create(spec), DomainError);
  Rng rng(1);
  REQUIRE_THROWS_AS(make_dataset(small_spec(), 0, rng), DomainError);
}
