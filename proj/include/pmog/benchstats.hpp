#pragma once

#include "pmog/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace pmog {

// One benchmark prompt: per-aspect embeddings plus spatial/stylistic token
// counts, ingested from JSON lines.
struct PromptRecord {
  std::string id;
  EmbeddingVector semantic_emb;
  EmbeddingVector spatial_emb;
  EmbeddingVector stylistic_emb;
  long spa_count = 0;
  long sty_count = 0;
  long token_count = 0;
};

inline void validate(const PromptRecord& rec) {
  auto check_emb = [&](const EmbeddingVector& e, const char* name) {
    if (e.size() < 1 || !e.allFinite() || !(e.norm() > 0.0))
      throw DomainError("prompt record '" + rec.id + "': " + name +
                        " embedding must be finite and nonzero");
  };
  check_emb(rec.semantic_emb, "semantic");
  check_emb(rec.spatial_emb, "spatial");
  check_emb(rec.stylistic_emb, "stylistic");
  if (rec.semantic_emb.size() != rec.spatial_emb.size() ||
      rec.semantic_emb.size() != rec.stylistic_emb.size())
    throw DimensionError("prompt record '" + rec.id +
                         "': aspect embeddings must share one dimension");
  if (rec.spa_count < 0 || rec.sty_count < 0)
    throw DomainError("prompt record '" + rec.id + "': counts must be nonnegative");
  if (rec.token_count < 1)
    throw DomainError("prompt record '" + rec.id + "': token_count must be positive");
  if (rec.spa_count + rec.sty_count > rec.token_count)
    throw DomainError("prompt record '" + rec.id +
                      "': spa_count + sty_count exceeds token_count");
}

// Concatenation of the three l2-normalized aspect embeddings; output norm
// is sqrt(3).
inline EmbeddingVector prompt_feature(const PromptRecord& rec) {
  validate(rec);
  const auto d = rec.semantic_emb.size();
  EmbeddingVector feature(3 * d);
  feature.segment(0, d) = rec.semantic_emb / rec.semantic_emb.norm();
  feature.segment(d, d) = rec.spatial_emb / rec.spatial_emb.norm();
  feature.segment(2 * d, d) = rec.stylistic_emb / rec.stylistic_emb.norm();
  return feature;
}

// Mean cosine similarity of each prompt's feature against all others.
inline std::vector<double> mean_similarities(const std::vector<PromptRecord>& records) {
  const int n = static_cast<int>(records.size());
  Matrix features(n, records.empty() ? 0 : 3 * records.front().semantic_emb.size());
  for (int i = 0; i < n; ++i) {
    EmbeddingVector f = prompt_feature(records[i]);
    if (f.size() != features.cols())
      throw DimensionError("mean_similarities: inconsistent embedding dimensions");
    features.row(i) = f.transpose();
  }
  std::vector<double> mean_sim(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const double norm_i = features.row(i).norm();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += features.row(i).dot(features.row(j)) /
             (norm_i * features.row(j).norm());
    }
    mean_sim[i] = acc / (n - 1);
  }
  return mean_sim;
}

// The K record ids with the lowest mean pairwise similarity, in ascending
// order of mean similarity; ties broken by ascending id.
inline std::vector<std::string> filter_prompts(const std::vector<PromptRecord>& records,
                                               int k) {
  const int n = static_cast<int>(records.size());
  if (n < 2) throw DomainError("filter_prompts: need at least 2 records");
  if (k < 1 || k > n)
    throw DomainError("filter_prompts: K must lie in [1, " + std::to_string(n) +
                      "], got " + std::to_string(k));
  std::vector<double> mean_sim = mean_similarities(records);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (mean_sim[a] != mean_sim[b]) return mean_sim[a] < mean_sim[b];
    return records[a].id < records[b].id;
  });
  std::vector<std::string> selected;
  selected.reserve(k);
  for (int i = 0; i < k; ++i) selected.push_back(records[order[i]].id);
  return selected;
}

// Normalized two-category entropy of the spatial/stylistic densities, in
// [0, 1]: 1 when the categories are even, 0 when one dominates. Normalizing
// by log 2 makes the two-category maximum exactly 1. The token total cancels
// out of the normalized densities.
inline double balance_score(long spa_count, long sty_count, long token_count) {
  (void)token_count;
  const long total = spa_count + sty_count;
  if (total < 1) return 0.0;
  double entropy = 0.0;
  for (long c : {spa_count, sty_count}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  return entropy / std::log(2.0);
}

// A prompt covers an aspect when the token density reaches tau or the raw
// count reaches k_min.
inline bool coverage(long count, long token_count, double tau = 0.05, long k_min = 5) {
  if (token_count < 1) throw DomainError("coverage: token_count must be positive");
  const double density = static_cast<double>(count) / static_cast<double>(token_count);
  return density >= tau || count >= k_min;
}

struct PromptStats {
  std::string id;
  double mean_similarity = 0.0;
  double balance = 0.0;
  bool cover_spa = false;
  bool cover_sty = false;
};

inline std::vector<PromptStats> prompt_statistics(const std::vector<PromptRecord>& records,
                                                  double tau = 0.05, long k_min = 5) {
  if (records.size() < 2)
    throw DomainError("prompt_statistics: need at least 2 records");
  std::vector<double> mean_sim = mean_similarities(records);
  std::vector<PromptStats> stats(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    stats[i].id = r.id;
    stats[i].mean_similarity = mean_sim[i];
    stats[i].balance = balance_score(r.spa_count, r.sty_count, r.token_count);
    stats[i].cover_spa = coverage(r.spa_count, r.token_count, tau, k_min);
    stats[i].cover_sty = coverage(r.sty_count, r.token_count, tau, k_min);
  }
  return stats;
}

}  // namespace pmog
