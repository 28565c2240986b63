#include "ellm/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ellm {

RewardRecord ellm_reward(const std::string& transition_caption, const SuggestionSet& goals,
                         double threshold, const Embedder& embedder) {
  return ellm_reward_multi(std::vector<std::string>{transition_caption}, goals, threshold,
                           embedder);
}

RewardRecord ellm_reward_multi(const std::vector<std::string>& transition_captions,
                               const SuggestionSet& goals, double threshold,
                               const Embedder& embedder) {
  if (threshold <= 0.0 || threshold > 1.0) {
    throw std::invalid_argument("similarity threshold must be in (0, 1]");
  }
  RewardRecord record;
  record.threshold = threshold;
  if (goals.empty()) return record;

  bool any_pair = false;
  double delta_max = 0.0;
  const std::string* best_goal = nullptr;
  for (const auto& caption : transition_captions) {
    if (caption.empty()) continue;
    const EmbeddingVector caption_embedding = embedder.embed(caption);
    for (const auto& goal : goals.goals) {
      const double delta = cosine(caption_embedding, embedder.embed(goal));
      if (!any_pair || delta > delta_max) {
        delta_max = delta;
        best_goal = &goal;
      }
      any_pair = true;
    }
  }
  if (!any_pair) return record;  // no usable caption

  record.delta_max = delta_max;
  if (delta_max > threshold) {
    record.reward = delta_max;
    if (best_goal) record.matched_goal = *best_goal;
  }
  return record;
}

HardcodedReward hardcoded_goal_reward(const std::optional<ActionSpec>& outcome,
                                      const SuggestionSet& goals,
                                      const EpisodeLedger* novelty_ledger) {
  HardcodedReward result;
  if (!outcome) return result;
  const std::string caption = outcome->text();
  for (const auto& goal : goals.goals) {
    if (goal != caption) continue;
    if (novelty_ledger && novelty_ledger->achieved(goal)) continue;
    result.reward = 1.0;
    result.matched_goal = goal;
    break;
  }
  return result;
}

// --- random network distillation ---

RndState RndState::init(int input_dim, const RndConfig& config, Rng& rng) {
  RndState state;
  state.config = config;
  state.target.init({input_dim, config.hidden_width, config.output_dim}, rng);
  state.predictor.init({input_dim, config.hidden_width, config.output_dim}, rng);
  return state;
}

std::uint64_t RndState::target_hash() const {
  std::vector<double> params;
  target.flatten_into(params);
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(params.data()),
                                  params.size() * sizeof(double)));
}

double rnd_novelty(const RndState& state, const Eigen::VectorXd& features) {
  const nn::Matrix x = features.transpose();
  const nn::Matrix predicted = state.predictor.forward(x);
  const nn::Matrix expected = state.target.forward(x);
  return (predicted - expected).row(0).norm();
}

double rnd_reward(RndState& state, const Eigen::VectorXd& features) {
  const nn::Matrix x = features.transpose();
  const nn::Matrix expected = state.target.forward(x);

  std::vector<nn::Matrix> pre;
  const nn::Matrix predicted = state.predictor.forward(x, &pre);
  const nn::Matrix diff = predicted - expected;
  const double reward = diff.row(0).norm();

  // One MSE step of the predictor toward the frozen target output.
  state.predictor.zero_grad();
  const nn::Matrix grad = 2.0 * diff / static_cast<double>(diff.cols());
  state.predictor.backward(x, pre, grad);
  state.adam_t += 1;
  state.predictor.adam_step(state.config.adam, state.adam_t);
  return reward;
}

// --- APT ---

AptBuffer::AptBuffer(int dimension, std::size_t capacity)
    : dimension_(dimension), capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("apt buffer capacity must be positive");
  ring_.resize(capacity);
}

void AptBuffer::push(const Eigen::VectorXd& embedding) {
  if (embedding.size() != dimension_) {
    throw std::invalid_argument("apt buffer: embedding dimension mismatch");
  }
  ring_[next_] = embedding;
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

std::vector<std::size_t> apt_nearest(const Eigen::VectorXd& query, const AptBuffer& buffer,
                                     int k) {
  std::vector<std::pair<double, std::size_t>> distances;
  distances.reserve(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    distances.emplace_back((buffer.at(i) - query).norm(), i);
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), distances.size());
  std::partial_sort(distances.begin(), distances.begin() + static_cast<long>(keep),
                    distances.end());
  std::vector<std::size_t> indices;
  indices.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) indices.push_back(distances[i].second);
  return indices;
}

double apt_reward(const Eigen::VectorXd& query, const AptBuffer& buffer, int k) {
  if (buffer.size() == 0) throw std::invalid_argument("apt reward needs a non-empty buffer");
  if (k < 1) throw std::invalid_argument("apt neighbor count must be >= 1");
  const std::vector<std::size_t> neighbors = apt_nearest(query, buffer, k);
  double total = 0.0;
  for (std::size_t index : neighbors) {
    total += (buffer.at(index) - query).norm();
  }
  const double mean = total / static_cast<double>(neighbors.size());
  return std::log(1.0 + mean);
}

// --- NovelD ---

double noveld_reward(double novelty_s, double novelty_s_next, bool first_visit, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("noveld alpha must be in [0, 1]");
  }
  if (!first_visit) return 0.0;
  return std::max(novelty_s_next - alpha * novelty_s, 0.0);
}

}  // namespace ellm
