#pragma once

#include "pmog/common.hpp"
#include "pmog/rng.hpp"

#include <string>
#include <vector>

namespace pmog {

// Pluggable text-encoder boundary: a deterministic map from a sentence
// sequence to a fixed-dimension embedding.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual int dim() const = 0;
  virtual EmbeddingVector encode(const std::vector<std::string>& sentences) const = 0;
};

// Desk-scale encoder: each sentence hashes to a seeded Gaussian vector, a
// sequence encodes to the l2-normalized mean of its sentence vectors. In high
// dimension distinct sentences come out near-orthogonal.
class MockEncoder final : public Encoder {
 public:
  MockEncoder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < 1) throw DomainError("MockEncoder: dimension must be positive");
  }

  int dim() const override { return dim_; }

  EmbeddingVector sentence_embedding(const std::string& sentence) const {
    Rng rng(derive_seed(seed_, sentence));
    return rng.normal_vector(dim_);
  }

  EmbeddingVector encode(const std::vector<std::string>& sentences) const override {
    if (sentences.empty()) throw DomainError("MockEncoder: empty sentence list");
    EmbeddingVector mean = EmbeddingVector::Zero(dim_);
    for (const auto& s : sentences) mean += sentence_embedding(s);
    mean /= static_cast<double>(sentences.size());
    const double norm = mean.norm();
    if (!(norm > 0.0))
      throw NumericalError("MockEncoder: sentence embeddings cancelled exactly");
    return mean / norm;
  }

 private:
  int dim_;
  std::uint64_t seed_;
};

// Mean embedding of the k-w overlapping windows of w+1 consecutive sentences
// (stride one). Chunk i covers sentences i..i+w, so the final chunk always
// reaches the last sentence.
inline EmbeddingVector chunk_embedding(const Encoder& encoder,
                                       const std::vector<std::string>& sentences,
                                       int window) {
  const int k = static_cast<int>(sentences.size());
  if (window < 1)
    throw DomainError("chunk_embedding: window must be >= 1, got " +
                      std::to_string(window));
  if (window >= k)
    throw DomainError("chunk_embedding: window " + std::to_string(window) +
                      " must be smaller than the sentence count " + std::to_string(k));
  const int chunk_count = k - window;
  EmbeddingVector sum = EmbeddingVector::Zero(encoder.dim());
  for (int i = 0; i < chunk_count; ++i) {
    std::vector<std::string> chunk(sentences.begin() + i,
                                   sentences.begin() + i + window + 1);
    sum += encoder.encode(chunk);
  }
  return sum / static_cast<double>(chunk_count);
}

}  // namespace pmog
