#include "ellm/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "ellm/rng.hpp"

namespace ellm {

namespace {

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

double recompute_norm(const std::vector<double>& components) {
  double sum = 0.0;
  for (double c : components) sum += c * c;
  return std::sqrt(sum);
}

}  // namespace

std::vector<std::string> tokenize_lexical(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_alnum(c)) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

LexicalEmbedder::LexicalEmbedder(int dimension) : dimension_(dimension) {
  if (dimension <= 0) throw std::invalid_argument("embedding dimension must be positive");
}

int LexicalEmbedder::bucket(std::string_view token) const {
  return static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(dimension_));
}

EmbeddingVector LexicalEmbedder::embed(std::string_view text) const {
  EmbeddingVector v;
  v.components.assign(static_cast<size_t>(dimension_), 0.0);
  for (const auto& token : tokenize_lexical(text)) {
    v.components[static_cast<size_t>(bucket(token))] += 1.0;
  }
  const double raw_norm = recompute_norm(v.components);
  if (raw_norm > 0.0) {
    for (double& c : v.components) c /= raw_norm;
  }
  v.norm = recompute_norm(v.components);
  return v;
}

RandomProjectionEmbedder::RandomProjectionEmbedder(int dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension <= 0) throw std::invalid_argument("embedding dimension must be positive");
}

EmbeddingVector RandomProjectionEmbedder::embed(std::string_view text) const {
  EmbeddingVector v;
  v.components.assign(static_cast<size_t>(dimension_), 0.0);
  for (const auto& token : tokenize_lexical(text)) {
    Rng token_rng(seed_ ^ fnv1a64(token));
    for (double& c : v.components) c += token_rng.next_gaussian();
  }
  const double raw_norm = recompute_norm(v.components);
  if (raw_norm > 0.0) {
    for (double& c : v.components) c /= raw_norm;
  }
  v.norm = recompute_norm(v.components);
  return v;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension()) {
    throw std::invalid_argument("cosine: dimension mismatch");
  }
  if (u.norm == 0.0 || v.norm == 0.0) return 0.0;
  double dot = 0.0;
  for (size_t i = 0; i < u.components.size(); ++i) {
    dot += u.components[i] * v.components[i];
  }
  return dot / (u.norm * v.norm);
}

}  // namespace ellm
