#pragma once

#include "pmog/common.hpp"
#include "pmog/geometry.hpp"
#include "pmog/mog.hpp"
#include "pmog/rng.hpp"
#include "pmog/vendi.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace pmog {

// ---------------------------------------------------------------------------
// Synthetic conditional data: a ring of Gaussian clusters in 2D, conditioned
// by codes built from seeded attribute embeddings. A fine code pins one
// cluster (sector + cluster attribute); a coarse code pins only a sector of
// cluster_count/2 clusters.
// ---------------------------------------------------------------------------

struct ToyDatasetSpec {
  int cluster_count = 8;
  double radius = 1.0;
  double cluster_std = 0.05;
  int cond_dim = 10;
  std::uint64_t seed = 0;
};

struct ConditioningCode {
  enum class Specificity { Coarse, Fine };
  EmbeddingVector values;
  Specificity specificity = Specificity::Fine;
  int sector = 0;
  int cluster = -1;  // -1 for coarse codes
};

struct ToyWorld {
  ToyDatasetSpec spec;
  std::vector<Eigen::Vector2d> cluster_centers;
  Matrix sector_embeddings;   // 2 x cond_dim
  Matrix cluster_embeddings;  // cluster_count x cond_dim

  static ToyWorld create(const ToyDatasetSpec& spec) {
    if (spec.cluster_count < 2)
      throw DomainError("ToyWorld: cluster_count must be >= 2");
    if (!(spec.cluster_std > 0.0))
      throw DomainError("ToyWorld: cluster_std must be positive");
    if (spec.cond_dim < 1) throw DomainError("ToyWorld: cond_dim must be positive");
    ToyWorld world;
    world.spec = spec;
    world.cluster_centers.resize(spec.cluster_count);
    for (int k = 0; k < spec.cluster_count; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / spec.cluster_count;
      world.cluster_centers[k] =
          spec.radius * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    }
    // Attribute embeddings at unit expected norm: entries N(0, 1/cond_dim).
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.cond_dim));
    Rng sector_rng = Rng(spec.seed).substream("sector-emb");
    Rng cluster_rng = Rng(spec.seed).substream("cluster-emb");
    world.sector_embeddings = scale * sector_rng.normal_matrix(2, spec.cond_dim);
    world.cluster_embeddings =
        scale * cluster_rng.normal_matrix(spec.cluster_count, spec.cond_dim);
    return world;
  }

  int sector_of(int cluster) const { return 2 * cluster / spec.cluster_count; }

  // Sum of the attribute embeddings the code specifies; the cluster attribute
  // contributes zero for coarse codes.
  ConditioningCode fine_code(int cluster) const {
    ConditioningCode code;
    code.specificity = ConditioningCode::Specificity::Fine;
    code.cluster = cluster;
    code.sector = sector_of(cluster);
    code.values = (sector_embeddings.row(code.sector) + cluster_embeddings.row(cluster))
                      .transpose();
    return code;
  }

  ConditioningCode coarse_code(int sector) const {
    ConditioningCode code;
    code.specificity = ConditioningCode::Specificity::Coarse;
    code.cluster = -1;
    code.sector = sector;
    code.values = sector_embeddings.row(sector).transpose();
    return code;
  }

  std::vector<int> feasible_clusters(const ConditioningCode& code) const {
    std::vector<int> feasible;
    if (code.specificity == ConditioningCode::Specificity::Fine) {
      feasible.push_back(code.cluster);
    } else {
      for (int k = 0; k < spec.cluster_count; ++k)
        if (sector_of(k) == code.sector) feasible.push_back(k);
    }
    return feasible;
  }
};

struct ToySample {
  Eigen::Vector2d point;
  int cluster = 0;
};

struct ToyDataset {
  ToyWorld world;
  std::vector<ToySample> samples;

  ConditioningCode fine_code_of(std::size_t i) const {
    return world.fine_code(samples[i].cluster);
  }
  ConditioningCode coarse_code_of(std::size_t i) const {
    return world.coarse_code(world.sector_of(samples[i].cluster));
  }
};

inline ToyDataset make_dataset(const ToyDatasetSpec& spec, int count, Rng& rng) {
  if (count < 1) throw DomainError("make_dataset: count must be >= 1");
  ToyDataset dataset;
  dataset.world = ToyWorld::create(spec);
  dataset.samples.resize(count);
  for (int i = 0; i < count; ++i) {
    const int k = static_cast<int>(
        rng.uniform_index(static_cast<std::uint64_t>(spec.cluster_count)));
    const double nx = rng.normal();
    const double ny = rng.normal();
    const Eigen::Vector2d noise(nx, ny);
    dataset.samples[i].cluster = k;
    dataset.samples[i].point =
        dataset.world.cluster_centers[k] + spec.cluster_std * noise;
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Velocity-field network: fully connected, tanh hidden layers, linear output.
// Input is the concatenation (x, t, code); output is the 2D velocity.
// ---------------------------------------------------------------------------

struct DenseLayer {
  Matrix w;  // out x in
  Eigen::VectorXd b;
};

struct FlowModel {
  std::vector<DenseLayer> layers;
  int cond_dim = 0;
  long training_steps = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double heldout_loss_initial = std::numeric_limits<double>::quiet_NaN();
  double heldout_loss_final = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> loss_history;

  int input_dim() const { return static_cast<int>(layers.front().w.cols()); }

  // Batch forward pass; rows are samples laid out as [x(2), t, code].
  Matrix forward(const Matrix& inputs) const {
    Matrix h = inputs;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      Matrix z = (h * layers[l].w.transpose()).rowwise() + layers[l].b.transpose();
      h = (l + 1 < layers.size()) ? z.array().tanh().matrix() : z;
    }
    return h;
  }

  Eigen::Vector2d velocity(const Eigen::Vector2d& x, double t,
                           const EmbeddingVector& code) const {
    Matrix input(1, 3 + code.size());
    input(0, 0) = x.x();
    input(0, 1) = x.y();
    input(0, 2) = t;
    input.row(0).tail(code.size()) = code.transpose();
    Matrix out = forward(input);
    return {out(0, 0), out(0, 1)};
  }
};

inline FlowModel init_flow_model(int cond_dim, const std::vector<int>& hidden,
                                 std::uint64_t seed) {
  if (cond_dim < 1) throw DomainError("init_flow_model: cond_dim must be positive");
  FlowModel model;
  model.cond_dim = cond_dim;
  Rng rng(seed);
  std::vector<int> sizes;
  sizes.push_back(3 + cond_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(2);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer;
    const double std_dev = std::sqrt(2.0 / (sizes[l] + sizes[l + 1]));
    layer.w = std_dev * rng.normal_matrix(sizes[l + 1], sizes[l]);
    layer.b = Eigen::VectorXd::Zero(sizes[l + 1]);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

struct FlowGradients {
  std::vector<Matrix> w;
  std::vector<Eigen::VectorXd> b;
};

// Mean squared velocity error over the batch; fills analytic parameter
// gradients when requested.
inline double flow_loss(const FlowModel& model, const Matrix& inputs,
                        const Matrix& targets, FlowGradients* grads = nullptr) {
  const auto batch = inputs.rows();
  const std::size_t layer_count = model.layers.size();
  std::vector<Matrix> activations(layer_count + 1);
  activations[0] = inputs;
  for (std::size_t l = 0; l < layer_count; ++l) {
    Matrix z = (activations[l] * model.layers[l].w.transpose()).rowwise() +
               model.layers[l].b.transpose();
    activations[l + 1] = (l + 1 < layer_count) ? z.array().tanh().matrix() : z;
  }
  const Matrix diff = activations[layer_count] - targets;
  const double loss = diff.squaredNorm() / static_cast<double>(batch);
  if (grads == nullptr) return loss;

  grads->w.resize(layer_count);
  grads->b.resize(layer_count);
  Matrix delta = 2.0 * diff / static_cast<double>(batch);
  for (std::size_t l = layer_count; l-- > 0;) {
    grads->w[l] = delta.transpose() * activations[l];
    grads->b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix back = delta * model.layers[l].w;
      delta = back.cwiseProduct(
          (1.0 - activations[l].array().square()).matrix());
    }
  }
  return loss;
}

struct TrainConfig {
  std::vector<int> hidden = {64, 64, 64};
  long steps = 20000;
  double learning_rate = 1e-3;
  int batch_size = 256;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Relative conditioning jitter, training only: the conditional map is
  // learned on a neighborhood of each code rather than on isolated points,
  // mirroring encoders that emit a dense embedding distribution.
  double cond_jitter = 0.25;
  int heldout_size = 1024;
};

namespace detail {

// Batch assembly: row = [x_t, t, code], target = x1 - x0, where x_t lies on
// the linear path (1-t) x0 + t x1. With this target the descending Euler
// update x_{t-dt} = x_t + (t_prev - t) v transports noise to data.
inline void fill_training_batch(const ToyDataset& dataset, const TrainConfig& config,
                                Rng& rng, Matrix& inputs, Matrix& targets) {
  const int cond_dim = dataset.world.spec.cond_dim;
  const double jitter_scale =
      config.cond_jitter / std::sqrt(static_cast<double>(cond_dim));
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    const auto& sample =
        dataset.samples[rng.uniform_index(dataset.samples.size())];
    const bool use_fine = rng.uniform() < 0.5;
    const ConditioningCode code =
        use_fine ? dataset.world.fine_code(sample.cluster)
                 : dataset.world.coarse_code(dataset.world.sector_of(sample.cluster));
    EmbeddingVector cond = code.values;
    if (config.cond_jitter > 0.0)
      cond += (jitter_scale * cond.norm()) * rng.normal_vector(cond_dim);
    const Eigen::Vector2d x0 = sample.point;
    const double zx = rng.normal();
    const double zy = rng.normal();
    const Eigen::Vector2d x1(zx, zy);
    const double t = rng.uniform();
    const Eigen::Vector2d xt = (1.0 - t) * x0 + t * x1;
    inputs(r, 0) = xt.x();
    inputs(r, 1) = xt.y();
    inputs(r, 2) = t;
    inputs.row(r).tail(cond_dim) = cond.transpose();
    targets(r, 0) = x1.x() - x0.x();
    targets(r, 1) = x1.y() - x0.y();
  }
}

}  // namespace detail

inline FlowModel train_velocity_field(const ToyDataset& dataset,
                                      const TrainConfig& config, Rng& rng) {
  if (dataset.samples.empty())
    throw DomainError("train_velocity_field: empty dataset");
  if (config.batch_size < 1 || config.steps < 0)
    throw DomainError("train_velocity_field: invalid batch size or step count");

  const int cond_dim = dataset.world.spec.cond_dim;
  FlowModel model =
      init_flow_model(cond_dim, config.hidden, rng.substream("init").next_u64());

  Rng heldout_rng = rng.substream("heldout");
  Matrix heldout_x(config.heldout_size, 3 + cond_dim);
  Matrix heldout_t(config.heldout_size, 2);
  detail::fill_training_batch(dataset, config, heldout_rng, heldout_x, heldout_t);
  model.heldout_loss_initial = flow_loss(model, heldout_x, heldout_t);

  std::vector<Matrix> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  for (const auto& layer : model.layers) {
    m_w.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    v_w.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
    m_b.push_back(Eigen::VectorXd::Zero(layer.b.size()));
    v_b.push_back(Eigen::VectorXd::Zero(layer.b.size()));
  }

  Rng train_rng = rng.substream("train");
  Matrix inputs(config.batch_size, 3 + cond_dim);
  Matrix targets(config.batch_size, 2);
  FlowGradients grads;
  const long record_every = std::max<long>(1, config.steps / 100);
  double loss = model.heldout_loss_initial;

  for (long step = 1; step <= config.steps; ++step) {
    detail::fill_training_batch(dataset, config, train_rng, inputs, targets);
    loss = flow_loss(model, inputs, targets, &grads);
    if (!std::isfinite(loss))
      throw NumericalError("train_velocity_field: loss diverged at step " +
                           std::to_string(step));
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      m_w[l] = config.beta1 * m_w[l] + (1.0 - config.beta1) * grads.w[l];
      v_w[l] = (config.beta2 * v_w[l].array() +
                (1.0 - config.beta2) * grads.w[l].array().square()).matrix();
      m_b[l] = config.beta1 * m_b[l] + (1.0 - config.beta1) * grads.b[l];
      v_b[l] = (config.beta2 * v_b[l].array() +
                (1.0 - config.beta2) * grads.b[l].array().square()).matrix();
      model.layers[l].w.array() -=
          config.learning_rate * (m_w[l].array() / c1) /
          ((v_w[l].array() / c2).sqrt() + config.adam_epsilon);
      model.layers[l].b.array() -=
          config.learning_rate * (m_b[l].array() / c1) /
          ((v_b[l].array() / c2).sqrt() + config.adam_epsilon);
    }
    if (step % record_every == 0 || step == config.steps)
      model.loss_history.push_back(loss);
  }

  model.training_steps = config.steps;
  model.final_loss = loss;
  model.heldout_loss_final = flow_loss(model, heldout_x, heldout_t);
  return model;
}

// ---------------------------------------------------------------------------
// Sampling: Euler integration of the velocity field on a uniform descending
// t-grid, x_{t_{k-1}} = x_{t_k} + (t_{k-1} - t_k) v(x_{t_k}, t_k).
// ---------------------------------------------------------------------------

inline Eigen::Vector2d euler_integrate(
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)>& velocity,
    const Eigen::Vector2d& x_init, int steps) {
  if (steps < 1) throw DomainError("euler_integrate: steps must be >= 1");
  Eigen::Vector2d x = x_init;
  for (int k = steps; k >= 1; --k) {
    const double t = static_cast<double>(k) / steps;
    const double t_prev = static_cast<double>(k - 1) / steps;
    x += (t_prev - t) * velocity(x, t);
    if (!x.allFinite())
      throw NumericalError("euler_integrate: non-finite state at t = " +
                           std::to_string(t_prev));
  }
  return x;
}

inline Eigen::Vector2d euler_sample(const FlowModel& model,
                                    const ConditioningCode& cond, int steps,
                                    Rng& rng) {
  const double zx = rng.normal();
  const double zy = rng.normal();
  const Eigen::Vector2d x_init(zx, zy);
  return euler_integrate(
      [&](const Eigen::Vector2d& x, double t) {
        return model.velocity(x, t, cond.values);
      },
      x_init, steps);
}

// ---------------------------------------------------------------------------
// Gradient verification: analytic backprop vs central finite differences of
// the batch loss, reported as the maximum relative discrepancy.
// ---------------------------------------------------------------------------

inline double gradient_check_on(FlowModel& model, const Matrix& inputs,
                                const Matrix& targets, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3))
    throw DomainError("gradient_check: eps must lie in [1e-7, 1e-3]");
  FlowGradients analytic;
  flow_loss(model, inputs, targets, &analytic);

  double max_rel = 0.0;
  auto probe = [&](double& param, double analytic_grad) {
    const double saved = param;
    param = saved + eps;
    const double plus = flow_loss(model, inputs, targets);
    param = saved - eps;
    const double minus = flow_loss(model, inputs, targets);
    param = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic_grad), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(analytic_grad - numeric) / denom);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    for (Eigen::Index i = 0; i < layer.w.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.w.cols(); ++j)
        probe(layer.w(i, j), analytic.w[l](i, j));
    for (Eigen::Index i = 0; i < layer.b.size(); ++i)
      probe(layer.b[i], analytic.b[l][i]);
  }
  return max_rel;
}

inline double gradient_check(FlowModel& model, double eps, int batch_size = 16,
                             std::uint64_t seed = 0) {
  Rng rng(derive_seed(seed, "gradient-check"));
  Matrix inputs = rng.normal_matrix(batch_size, model.input_dim());
  Matrix targets = rng.normal_matrix(batch_size, 2);
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) inputs(r, 2) = rng.uniform();
  return gradient_check_on(model, inputs, targets, eps);
}

// ---------------------------------------------------------------------------
// Diversity experiment: baseline conditions every draw on the base code;
// the mixture method places simplex centers around it in code space and
// conditions each draw on one mixture sample, then denoises in full.
// ---------------------------------------------------------------------------

enum class SamplingMethod { Baseline, PromptMog };

struct MethodSpec {
  SamplingMethod method = SamplingMethod::Baseline;
  double gamma_sim = 0.7;
  double sigma_base = 0.25;
  int n_modes = 50;
  GammaMode gamma_mode = GammaMode::Standard;
};

struct ExperimentConfig {
  int samples = 300;
  int flow_steps = 28;
  double kernel_lengthscale = 0.25;  // fixed for cross-method comparability
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

struct SeedSetResult {
  std::uint64_t seed = 0;
  double vendi = 0.0;
  double mean_dist = 0.0;
  double off_support_frac = 0.0;
  Matrix points;  // samples x 2
};

struct ExperimentReport {
  std::vector<SeedSetResult> per_seed;
  double mean_vendi = 0.0;
  double mean_dist = 0.0;
  double mean_off_support = 0.0;
};

inline ExperimentReport diversity_experiment(const FlowModel& model,
                                             const ToyWorld& world,
                                             const ConditioningCode& base_code,
                                             const MethodSpec& method,
                                             const ExperimentConfig& config) {
  if (config.samples < 50)
    throw DomainError("diversity_experiment: need at least 50 samples");
  if (config.seeds.empty())
    throw DomainError("diversity_experiment: need at least one seed");
  if (model.cond_dim != world.spec.cond_dim)
    throw DimensionError("diversity_experiment: model and world disagree on cond_dim");

  const std::vector<int> feasible = world.feasible_clusters(base_code);
  const double off_radius = 5.0 * world.spec.cluster_std;

  ExperimentReport report;
  for (std::uint64_t seed : config.seeds) {
    Rng noise_rng(derive_seed(seed, "noise"));
    Rng mog_rng(derive_seed(seed, "mog"));

    MoGModel mixture;
    if (method.method == SamplingMethod::PromptMog) {
      const double gamma = gamma_sim_to_euc(method.gamma_sim,
                                            base_code.values.norm(),
                                            method.gamma_mode);
      SimplexFrame frame =
          simplex_directions(method.n_modes, static_cast<int>(base_code.values.size()));
      CenterSet centers = place_centers(base_code.values, frame, gamma,
                                        derive_seed(seed, "rotation"));
      if (method.sigma_base > 0.0) {
        mixture = build_mog(centers, method.sigma_base);
      } else {
        mixture.centers = centers.centers;
        mixture.sigma = 0.0;
      }
    }

    SeedSetResult result;
    result.seed = seed;
    result.points.resize(config.samples, 2);
    double dist_sum = 0.0;
    int off_count = 0;
    for (int i = 0; i < config.samples; ++i) {
      ConditioningCode cond = base_code;
      if (method.method == SamplingMethod::PromptMog)
        cond.values = sample_mog(mixture, mog_rng).first;
      const Eigen::Vector2d x =
          euler_sample(model, cond, config.flow_steps, noise_rng);
      result.points.row(i) = x.transpose();
      double dist = std::numeric_limits<double>::infinity();
      for (int k : feasible)
        dist = std::min(dist, (x - world.cluster_centers[k]).norm());
      dist_sum += dist;
      if (dist > off_radius) ++off_count;
    }
    result.vendi =
        vendi_score(rbf_kernel(result.points, config.kernel_lengthscale));
    result.mean_dist = dist_sum / config.samples;
    result.off_support_frac = static_cast<double>(off_count) / config.samples;

    report.mean_vendi += result.vendi;
    report.mean_dist += result.mean_dist;
    report.mean_off_support += result.off_support_frac;
    report.per_seed.push_back(std::move(result));
  }
  const auto seed_count = static_cast<double>(report.per_seed.size());
  report.mean_vendi /= seed_count;
  report.mean_dist /= seed_count;
  report.mean_off_support /= seed_count;
  return report;
}

// Reference configuration for the shipped experiments. cond_dim must be at
// least n_modes - 1 to host the default 50-mode construction; 256 keeps the
// code-discriminative directions a small fraction of the ambient dimension.
inline ToyDatasetSpec reference_dataset_spec() {
  ToyDatasetSpec spec;
  spec.cluster_count = 8;
  spec.radius = 1.0;
  spec.cluster_std = 0.05;
  spec.cond_dim = 256;
  spec.seed = 42;
  return spec;
}

inline TrainConfig reference_train_config() { return TrainConfig{}; }

inline int reference_dataset_count() { return 8192; }

}  // namespace pmog
