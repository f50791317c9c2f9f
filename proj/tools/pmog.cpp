// Batch front end: wires the embedding-geometry, mixture, diversity, flow and
// benchmark-statistics modules to stable on-disk formats. Every subcommand is
// deterministic for a fixed seed and rewrites its outputs byte-identically.

#include "pmog/benchstats.hpp"
#include "pmog/flow.hpp"
#include "pmog/geometry.hpp"
#include "pmog/io.hpp"
#include "pmog/mog.hpp"
#include "pmog/textproxy.hpp"
#include "pmog/vendi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace pmog;

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumerical = 4;

void emit_error(int code, const std::string& message) {
  std::cerr << "{\"code\": " << code << ", \"error\": \""
            << io::escape_json(message) << "\"}\n";
}

GammaMode parse_mode(const std::string& mode) {
  if (mode == "standard") return GammaMode::Standard;
  if (mode == "paper-literal") return GammaMode::Literal;
  throw DomainError("unknown conversion mode '" + mode +
                    "' (expected standard or paper-literal)");
}

EmbeddingVector read_single_embedding(const std::string& path) {
  Matrix vectors = io::read_embedding_file(path);
  if (vectors.rows() != 1)
    throw DomainError(path + ": expected exactly one embedding vector, found " +
                      std::to_string(vectors.rows()));
  return vectors.row(0).transpose();
}

// Normal quantile at 0.999 for the Wilson-Hilferty chi-square approximation.
constexpr double kZ999 = 3.090232306167813;

double chi2_quantile_999(int dof) {
  const double k = dof;
  const double c = 2.0 / (9.0 * k);
  const double t = 1.0 - c + kZ999 * std::sqrt(c);
  return k * t * t * t;
}

struct SimplexArgs {
  std::string in, out;
  int n = 50;
  double gamma_sim = 0.7;
  std::string mode = "standard";
  std::uint64_t seed = 0;
};

void run_simplex(const SimplexArgs& args) {
  EmbeddingVector base = read_single_embedding(args.in);
  SimplexFrame frame = simplex_directions(args.n, static_cast<int>(base.size()));
  const double gamma = gamma_sim_to_euc(args.gamma_sim, base.norm(), parse_mode(args.mode));
  CenterSet centers =
      place_centers(base, frame, gamma, derive_seed(args.seed, "rotation"));
  io::write_centers_file(args.out, centers, args.seed);
}

struct SampleArgs {
  std::string in, out;
  double sigma_base = 0.25;
  int count = 6;
  std::uint64_t seed = 0;
};

void run_sample(const SampleArgs& args) {
  if (args.count < 1) throw DomainError("sample: count must be >= 1");
  if (args.sigma_base < 0.0) throw DomainError("sample: sigma-base must be >= 0");
  CenterSet centers = io::read_centers_file(args.in);
  MoGModel model;
  if (args.sigma_base == 0.0) {
    model.centers = centers.centers;  // degenerate point-mass mixture
    model.sigma = 0.0;
  } else {
    model = build_mog(centers, args.sigma_base);
  }
  Rng rng(derive_seed(args.seed, "mog"));
  io::SamplesFile file;
  file.samples.resize(args.count, model.dim());
  file.components.reserve(args.count);
  for (int i = 0; i < args.count; ++i) {
    auto [sample, idx] = sample_mog(model, rng);
    file.samples.row(i) = sample.transpose();
    file.components.push_back(idx);
  }
  file.component_count = model.component_count();
  file.sigma = model.sigma;
  file.seed = args.seed;
  io::write_samples_file(args.out, file);
}

struct VendiArgs {
  std::string in, out;
  std::string kernel = "cosine";
  std::string lengthscale = "median";
};

void run_vendi(const VendiArgs& args) {
  Matrix features = io::read_embedding_file(args.in);
  KernelMatrix kernel;
  if (args.kernel == "cosine") {
    kernel = cosine_kernel(features);
  } else if (args.kernel == "rbf") {
    std::optional<double> scale;
    if (args.lengthscale != "median") {
      try {
        scale = std::stod(args.lengthscale);
      } catch (const std::exception&) {
        throw DomainError("vendi: lengthscale must be a number or 'median'");
      }
    }
    kernel = rbf_kernel(features, scale);
  } else {
    throw DomainError("vendi: unknown kernel '" + args.kernel +
                      "' (expected cosine or rbf)");
  }
  VendiResult result = vendi_result(kernel);
  std::string out = "{\n  \"score\": " + io::format_double(result.score) + ",\n";
  out += "  \"kernel\": \"" + args.kernel + "\",\n";
  out += "  \"eigenvalues\": " +
         io::vector_json(result.eigenvalues.transpose()) + "\n}\n";
  io::write_file(args.out, out);
}

struct ToyEntropyArgs {
  std::string out;
  int max_n = 10;
  double sigma = 1.0;
  double delta_factor = 6.0;
  int samples = 300;
  std::uint64_t seed = 0;
};

void run_toy_entropy(const ToyEntropyArgs& args) {
  if (args.max_n < 1) throw DomainError("toy-entropy: max-n must be >= 1");
  if (args.samples < 2) throw DomainError("toy-entropy: samples must be >= 2");
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"n", "h_estimated", "h_theoretical", "vendi_" + std::to_string(args.samples)});
  const double delta = args.delta_factor * args.sigma;
  for (int n = 1; n <= args.max_n; ++n) {
    EntropyReport report = mog_entropy_1d(n, args.sigma, delta);
    Rng rng(derive_seed(args.seed, "toy-entropy", static_cast<std::uint64_t>(n)));
    Matrix draws(args.samples, 1);
    for (int i = 0; i < args.samples; ++i) {
      const auto k = rng.uniform_index(static_cast<std::uint64_t>(n));
      draws(i, 0) = static_cast<double>(k) * delta + args.sigma * rng.normal();
    }
    const double vs = vendi_score(rbf_kernel(draws, args.sigma));
    rows.push_back({std::to_string(n), io::format_double(report.h_mix),
                    io::format_double(report.theoretical), io::format_double(vs)});
  }
  io::write_csv(args.out, rows);
}

struct ToyFlowTrainArgs {
  std::string out;
  std::uint64_t seed = 0;
  int clusters = 8;
  double radius = 1.0;
  double cluster_std = 0.05;
  int cond_dim = 256;
  std::uint64_t dataset_seed = 42;
  int count = 8192;
  long steps = 20000;
  double lr = 1e-3;
  int batch = 256;
  std::vector<int> hidden = {64, 64, 64};
  double cond_jitter = 0.25;
};

void run_toy_flow_train(const ToyFlowTrainArgs& args) {
  ToyDatasetSpec spec;
  spec.cluster_count = args.clusters;
  spec.radius = args.radius;
  spec.cluster_std = args.cluster_std;
  spec.cond_dim = args.cond_dim;
  spec.seed = args.dataset_seed;
  Rng data_rng(derive_seed(spec.seed, "data"));
  ToyDataset dataset = make_dataset(spec, args.count, data_rng);

  TrainConfig config;
  config.hidden = args.hidden;
  config.steps = args.steps;
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.cond_jitter = args.cond_jitter;
  Rng train_rng(args.seed);
  FlowModel model = train_velocity_field(dataset, config, train_rng);
  io::save_flow_model(args.out, model, spec);
}

struct ToyFlowEvalArgs {
  std::string model, out;
  std::string method = "baseline";
  std::string specificity = "fine";
  int cluster = 0;
  int sector = 0;
  int samples = 300;
  int seed_sets = 5;
  std::uint64_t seed = 0;
  int steps = 28;
  double gamma_sim = 0.7;
  double sigma_base = 0.25;
  int n_modes = 50;
  std::string mode = "standard";
  double lengthscale = 0.25;
};

void run_toy_flow_eval(const ToyFlowEvalArgs& args) {
  auto [model, spec] = io::load_flow_model(args.model);
  ToyWorld world = ToyWorld::create(spec);

  ConditioningCode base;
  if (args.specificity == "fine") {
    if (args.cluster < 0 || args.cluster >= spec.cluster_count)
      throw DomainError("toy-flow eval: cluster index out of range");
    base = world.fine_code(args.cluster);
  } else if (args.specificity == "coarse") {
    if (args.sector < 0 || args.sector > 1)
      throw DomainError("toy-flow eval: sector must be 0 or 1");
    base = world.coarse_code(args.sector);
  } else {
    throw DomainError("toy-flow eval: specificity must be fine or coarse");
  }

  MethodSpec method;
  if (args.method == "baseline") {
    method.method = SamplingMethod::Baseline;
  } else if (args.method == "promptmog") {
    method.method = SamplingMethod::PromptMog;
    method.gamma_sim = args.gamma_sim;
    method.sigma_base = args.sigma_base;
    method.n_modes = args.n_modes;
    method.gamma_mode = parse_mode(args.mode);
  } else {
    throw DomainError("toy-flow eval: method must be baseline or promptmog");
  }

  ExperimentConfig config;
  config.samples = args.samples;
  config.flow_steps = args.steps;
  config.kernel_lengthscale = args.lengthscale;
  config.seeds.clear();
  for (int i = 0; i < args.seed_sets; ++i)
    config.seeds.push_back(derive_seed(args.seed, "seed-set", i));

  ExperimentReport report = diversity_experiment(model, world, base, method, config);

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"method", "code_specificity", "seed_set", "vendi", "mean_dist",
                  "off_support_frac"});
  for (std::size_t i = 0; i < report.per_seed.size(); ++i) {
    const auto& r = report.per_seed[i];
    rows.push_back({args.method, args.specificity, std::to_string(i),
                    io::format_double(r.vendi), io::format_double(r.mean_dist),
                    io::format_double(r.off_support_frac)});
  }
  rows.push_back({args.method, args.specificity, "mean",
                  io::format_double(report.mean_vendi),
                  io::format_double(report.mean_dist),
                  io::format_double(report.mean_off_support)});
  io::write_csv(args.out, rows);
}

struct ChunkArgs {
  std::string in, out;
  int window = 1;
  int dim = 64;
  std::uint64_t seed = 0;
};

void run_chunk(const ChunkArgs& args) {
  nlohmann::json j = io::parse_json(io::read_file(args.in), args.in);
  if (!j.is_array())
    throw DomainError(args.in + ": expected a JSON array of sentences");
  std::vector<std::string> sentences;
  for (const auto& s : j) {
    if (!s.is_string())
      throw DomainError(args.in + ": sentences must be strings");
    sentences.push_back(s.get<std::string>());
  }
  MockEncoder encoder(args.dim, args.seed);
  EmbeddingVector emb = chunk_embedding(encoder, sentences, args.window);
  io::write_embedding_file(args.out, emb.transpose());
}

struct FilterArgs {
  std::string in, out, stats;
  int k = 40;
};

void run_filter(const FilterArgs& args) {
  std::vector<PromptRecord> records = io::read_prompt_records(args.in);
  std::vector<std::string> selected = filter_prompts(records, args.k);
  io::write_id_list(args.out, selected);
  if (!args.stats.empty()) {
    std::vector<PromptStats> stats = prompt_statistics(records);
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"id", "mean_similarity", "balance", "cover_spa", "cover_sty"});
    for (const auto& s : stats)
      rows.push_back({s.id, io::format_double(s.mean_similarity),
                      io::format_double(s.balance), s.cover_spa ? "1" : "0",
                      s.cover_sty ? "1" : "0"});
    io::write_csv(args.stats, rows);
  }
}

struct BalanceArgs {
  std::string out;
  long spa = 0;
  long sty = 0;
  long tokens = 1;
};

void run_balance(const BalanceArgs& args) {
  if (args.spa < 0 || args.sty < 0)
    throw DomainError("balance: counts must be nonnegative");
  if (args.tokens < 1) throw DomainError("balance: tokens must be positive");
  if (args.spa + args.sty > args.tokens)
    throw DomainError("balance: spa + sty exceeds tokens");
  const double score = balance_score(args.spa, args.sty, args.tokens);
  std::string out = "{\"balance\": " + io::format_double(score) +
                    ", \"cover_spa\": " + (coverage(args.spa, args.tokens) ? "true" : "false") +
                    ", \"cover_sty\": " + (coverage(args.sty, args.tokens) ? "true" : "false") +
                    "}\n";
  if (args.out.empty())
    std::cout << out;
  else
    io::write_file(args.out, out);
}

struct CheckArgs {
  std::string in, out;
};

int run_check(const CheckArgs& args) {
  nlohmann::json j = io::parse_json(io::read_file(args.in), args.in);
  std::string report;
  bool ok = true;

  if (j.contains("components")) {
    // Mixture samples: chi-square uniformity of the component histogram.
    io::SamplesFile file = io::read_samples_file(args.in);
    if (file.component_count < 1)
      throw DomainError(args.in + ": invalid component count");
    std::vector<long> counts(file.component_count, 0);
    for (int c : file.components) {
      if (c < 0 || c >= file.component_count)
        throw DomainError(args.in + ": component index out of range");
      ++counts[c];
    }
    const double expected =
        static_cast<double>(file.components.size()) / file.component_count;
    double stat = 0.0;
    for (long c : counts) {
      const double diff = c - expected;
      stat += diff * diff / expected;
    }
    double threshold = 0.0;
    if (file.component_count > 1) {
      threshold = chi2_quantile_999(file.component_count - 1);
      ok = stat <= threshold;
    }
    report = "{\"check\": \"uniformity\", \"ok\": " + std::string(ok ? "true" : "false") +
             ", \"statistic\": " + io::format_double(stat) +
             ", \"threshold\": " + io::format_double(threshold) + "}\n";
  } else if (j.contains("base") && j.contains("gamma_euc")) {
    // Center set: radii and pairwise offset inner products.
    CenterSet set = io::read_centers_file(args.in);
    const auto n = set.centers.rows();
    const double gamma = set.gamma_euc;
    Matrix offsets = set.centers.rowwise() - set.base.transpose();
    double max_radius_err = 0.0, max_gram_err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      max_radius_err = std::max(max_radius_err,
                                std::abs(offsets.row(i).norm() - gamma));
      for (Eigen::Index k = i + 1; k < n; ++k)
        max_gram_err = std::max(
            max_gram_err, std::abs(offsets.row(i).dot(offsets.row(k)) +
                                   gamma * gamma / (n - 1)));
    }
    const double radius_tol = 1e-9 * std::max(1.0, gamma);
    const double gram_tol = 1e-6 * std::max(1.0, gamma * gamma);
    ok = max_radius_err <= radius_tol && max_gram_err <= gram_tol;
    report = "{\"check\": \"centers\", \"ok\": " + std::string(ok ? "true" : "false") +
             ", \"max_radius_error\": " + io::format_double(max_radius_err) +
             ", \"max_gram_error\": " + io::format_double(max_gram_err) + "}\n";
  } else if (j.contains("vectors")) {
    Matrix vectors = io::read_embedding_file(args.in);
    report = "{\"check\": \"embedding\", \"ok\": true, \"rows\": " +
             std::to_string(vectors.rows()) + ", \"dim\": " +
             std::to_string(vectors.cols()) + "}\n";
  } else {
    throw DomainError(args.in + ": unrecognized file (no vectors/components/base keys)");
  }

  if (args.out.empty())
    std::cout << report;
  else
    io::write_file(args.out, report);
  if (!ok) {
    emit_error(kExitDomain, args.in + ": invariant check failed");
    return kExitDomain;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedding-space mixture sampling and diversity measurement toolkit"};
  app.require_subcommand(1);

  SimplexArgs simplex_args;
  auto* cmd_simplex = app.add_subcommand(
      "simplex", "Place uniformly separated centers around a base embedding");
  cmd_simplex->add_option("--in", simplex_args.in, "Base embedding JSON")->required();
  cmd_simplex->add_option("--out", simplex_args.out, "Output centers JSON")->required();
  cmd_simplex->add_option("--n", simplex_args.n, "Number of centers")
      ->capture_default_str();
  cmd_simplex->add_option("--gamma-sim", simplex_args.gamma_sim,
                          "Cosine similarity threshold")->capture_default_str();
  cmd_simplex->add_option("--mode", simplex_args.mode,
                          "Conversion mode: standard or paper-literal")
      ->capture_default_str();
  cmd_simplex->add_option("--seed", simplex_args.seed, "Rotation seed")
      ->capture_default_str();

  SampleArgs sample_args;
  auto* cmd_sample = app.add_subcommand("sample", "Draw embeddings from the mixture");
  cmd_sample->add_option("--in", sample_args.in, "Centers JSON")->required();
  cmd_sample->add_option("--out", sample_args.out, "Output samples JSON")->required();
  cmd_sample->add_option("--sigma-base", sample_args.sigma_base,
                         "Component spread before gamma/sqrt(d) scaling")
      ->capture_default_str();
  cmd_sample->add_option("--count", sample_args.count, "Number of draws")
      ->capture_default_str();
  cmd_sample->add_option("--seed", sample_args.seed, "Sampling seed")
      ->capture_default_str();

  VendiArgs vendi_args;
  auto* cmd_vendi = app.add_subcommand("vendi", "Diversity score of a feature set");
  cmd_vendi->add_option("--in", vendi_args.in, "Feature vectors JSON")->required();
  cmd_vendi->add_option("--out", vendi_args.out, "Output result JSON")->required();
  cmd_vendi->add_option("--kernel", vendi_args.kernel, "Kernel: cosine or rbf")
      ->capture_default_str();
  cmd_vendi->add_option("--lengthscale", vendi_args.lengthscale,
                        "RBF lengthscale (number or 'median')")
      ->capture_default_str();

  ToyEntropyArgs entropy_args;
  auto* cmd_entropy = app.add_subcommand(
      "toy-entropy", "Mixture entropy sweep with diversity scores (CSV)");
  cmd_entropy->add_option("--out", entropy_args.out, "Output CSV")->required();
  cmd_entropy->add_option("--max-n", entropy_args.max_n, "Largest component count")
      ->capture_default_str();
  cmd_entropy->add_option("--sigma", entropy_args.sigma, "Component std deviation")
      ->capture_default_str();
  cmd_entropy->add_option("--delta-factor", entropy_args.delta_factor,
                          "Center spacing in units of sigma")->capture_default_str();
  cmd_entropy->add_option("--samples", entropy_args.samples,
                          "Draws per n for the diversity score")->capture_default_str();
  cmd_entropy->add_option("--seed", entropy_args.seed, "Sampling seed")
      ->capture_default_str();

  auto* cmd_flow = app.add_subcommand("toy-flow", "Toy conditional flow testbed");
  cmd_flow->require_subcommand(1);

  ToyFlowTrainArgs train_args;
  auto* cmd_train = cmd_flow->add_subcommand("train", "Train the velocity field");
  cmd_train->add_option("--out", train_args.out, "Output model JSON")->required();
  cmd_train->add_option("--seed", train_args.seed, "Training seed")->capture_default_str();
  cmd_train->add_option("--clusters", train_args.clusters, "Cluster count")
      ->capture_default_str();
  cmd_train->add_option("--radius", train_args.radius, "Ring radius")
      ->capture_default_str();
  cmd_train->add_option("--cluster-std", train_args.cluster_std, "Cluster std deviation")
      ->capture_default_str();
  cmd_train->add_option("--cond-dim", train_args.cond_dim, "Conditioning dimension")
      ->capture_default_str();
  cmd_train->add_option("--dataset-seed", train_args.dataset_seed, "Dataset seed")
      ->capture_default_str();
  cmd_train->add_option("--count", train_args.count, "Dataset size")
      ->capture_default_str();
  cmd_train->add_option("--steps", train_args.steps, "Training steps")
      ->capture_default_str();
  cmd_train->add_option("--lr", train_args.lr, "Learning rate")->capture_default_str();
  cmd_train->add_option("--batch", train_args.batch, "Batch size")->capture_default_str();
  cmd_train->add_option("--hidden", train_args.hidden, "Hidden layer sizes")
      ->capture_default_str();
  cmd_train->add_option("--cond-jitter", train_args.cond_jitter,
                        "Relative conditioning jitter during training")
      ->capture_default_str();

  ToyFlowEvalArgs eval_args;
  auto* cmd_eval = cmd_flow->add_subcommand("eval", "Run the diversity experiment");
  cmd_eval->add_option("--model", eval_args.model, "Model checkpoint JSON")->required();
  cmd_eval->add_option("--out", eval_args.out, "Output report CSV")->required();
  cmd_eval->add_option("--method", eval_args.method, "baseline or promptmog")
      ->capture_default_str();
  cmd_eval->add_option("--specificity", eval_args.specificity, "fine or coarse")
      ->capture_default_str();
  cmd_eval->add_option("--cluster", eval_args.cluster, "Cluster for fine codes")
      ->capture_default_str();
  cmd_eval->add_option("--sector", eval_args.sector, "Sector for coarse codes")
      ->capture_default_str();
  cmd_eval->add_option("--samples", eval_args.samples, "Samples per seed set")
      ->capture_default_str();
  cmd_eval->add_option("--seed-sets", eval_args.seed_sets, "Number of seed sets")
      ->capture_default_str();
  cmd_eval->add_option("--seed", eval_args.seed, "Root seed")->capture_default_str();
  cmd_eval->add_option("--steps", eval_args.steps, "Sampler steps")
      ->capture_default_str();
  cmd_eval->add_option("--gamma-sim", eval_args.gamma_sim, "Cosine threshold")
      ->capture_default_str();
  cmd_eval->add_option("--sigma-base", eval_args.sigma_base, "Component spread base")
      ->capture_default_str();
  cmd_eval->add_option("--n", eval_args.n_modes, "Number of modes")
      ->capture_default_str();
  cmd_eval->add_option("--mode", eval_args.mode, "Conversion mode")
      ->capture_default_str();
  cmd_eval->add_option("--lengthscale", eval_args.lengthscale,
                       "RBF lengthscale for the diversity score")
      ->capture_default_str();

  ChunkArgs chunk_args;
  auto* cmd_chunk = app.add_subcommand(
      "chunk", "Windowed-mean embedding of a sentence list (mock encoder)");
  cmd_chunk->add_option("--in", chunk_args.in, "JSON array of sentences")->required();
  cmd_chunk->add_option("--out", chunk_args.out, "Output embedding JSON")->required();
  cmd_chunk->add_option("--window", chunk_args.window, "Window size w")
      ->capture_default_str();
  cmd_chunk->add_option("--dim", chunk_args.dim, "Encoder dimension")
      ->capture_default_str();
  cmd_chunk->add_option("--seed", chunk_args.seed, "Encoder seed")
      ->capture_default_str();

  FilterArgs filter_args;
  auto* cmd_filter = app.add_subcommand(
      "filter", "Select the least-redundant prompts by mean pairwise similarity");
  cmd_filter->add_option("--in", filter_args.in, "Prompt records (JSON lines)")
      ->required();
  cmd_filter->add_option("--out", filter_args.out, "Output selected ids JSON")
      ->required();
  cmd_filter->add_option("--stats", filter_args.stats, "Optional per-record CSV");
  cmd_filter->add_option("--k", filter_args.k, "Number of prompts to keep")
      ->capture_default_str();

  BalanceArgs balance_args;
  auto* cmd_balance = app.add_subcommand(
      "balance", "Two-category balance entropy of token counts");
  cmd_balance->add_option("--spa", balance_args.spa, "Spatial token count")->required();
  cmd_balance->add_option("--sty", balance_args.sty, "Stylistic token count")->required();
  cmd_balance->add_option("--tokens", balance_args.tokens, "Total token count")
      ->required();
  cmd_balance->add_option("--out", balance_args.out, "Optional output JSON path");

  CheckArgs check_args;
  auto* cmd_check = app.add_subcommand(
      "check", "Verify invariants of a centers, samples or embedding file");
  cmd_check->add_option("--in", check_args.in, "File to verify")->required();
  cmd_check->add_option("--out", check_args.out, "Optional report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(kExitUsage, e.what());
    return kExitUsage;
  }

  try {
    if (cmd_simplex->parsed()) run_simplex(simplex_args);
    if (cmd_sample->parsed()) run_sample(sample_args);
    if (cmd_vendi->parsed()) run_vendi(vendi_args);
    if (cmd_entropy->parsed()) run_toy_entropy(entropy_args);
    if (cmd_flow->parsed() && cmd_train->parsed()) run_toy_flow_train(train_args);
    if (cmd_flow->parsed() && cmd_eval->parsed()) run_toy_flow_eval(eval_args);
    if (cmd_chunk->parsed()) run_chunk(chunk_args);
    if (cmd_filter->parsed()) run_filter(filter_args);
    if (cmd_balance->parsed()) run_balance(balance_args);
    if (cmd_check->parsed()) return run_check(check_args);
  } catch (const NumericalError& e) {
    emit_error(kExitNumerical, e.what());
    return kExitNumerical;
  } catch (const DomainError& e) {
    emit_error(kExitDomain, e.what());
    return kExitDomain;
  } catch (const Error& e) {
    emit_error(kExitDomain, e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    emit_error(kExitNumerical, e.what());
    return kExitNumerical;
  }
  return 0;
}
