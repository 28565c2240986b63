#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ellm {

struct EmbeddingVector {
  std::vector<double> components;
  double norm = 0.0;  // sqrt of the sum of squared components

  bool zero() const { return norm == 0.0; }
  size_t dimension() const { return components.size(); }
};

// Text encoder interface. The reward path only assumes this contract, so the
// lexical default can be swapped for any sentence encoder.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dimension() const = 0;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Deterministic bag-of-tokens encoder: lowercase, split on non-alphanumeric
// runs, FNV-1a 64 bucket per token, counts, L2-normalized. Empty text maps to
// the zero vector.
class LexicalEmbedder final : public Embedder {
 public:
  explicit LexicalEmbedder(int dimension = 128);
  int dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view text) const override;

  // Bucket index a single token hashes to.
  int bucket(std::string_view token) const;

 private:
  int dimension_;
};

// Alternative encoder used to exercise embedder pluggability: each token maps
// to a seeded gaussian direction, token vectors are summed and normalized.
class RandomProjectionEmbedder final : public Embedder {
 public:
  RandomProjectionEmbedder(int dimension, std::uint64_t seed);
  int dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  int dimension_;
  std::uint64_t seed_;
};

std::vector<std::string> tokenize_lexical(std::string_view text);

// u.v / (|u||v|) using the cached norms; 0 when either vector is zero.
// Dimension mismatch is a programming error.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

}  // namespace ellm
