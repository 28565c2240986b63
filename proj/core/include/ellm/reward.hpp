#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "ellm/embedding.hpp"
#include "ellm/nn.hpp"
#include "ellm/observation.hpp"
#include "ellm/suggestion.hpp"

namespace ellm {

// One transition's similarity-reward verdict: the maximum cosine similarity
// against the suggested goals and the thresholded reward. reward equals
// delta_max exactly when positive; matched_goal is present iff reward > 0.
struct RewardRecord {
  double delta_max = 0.0;
  std::optional<std::string> matched_goal;
  double threshold = 0.0;
  double reward = 0.0;
};

// Similarity reward: delta_max = max_i cosine(E(caption), E(goal_i)),
// rewarded when strictly above the threshold T in (0, 1]. Empty caption or
// goal set yields zero.
RewardRecord ellm_reward(const std::string& transition_caption, const SuggestionSet& goals,
                         double threshold, const Embedder& embedder);

// Noisy-captioner variant: delta_max additionally maximizes over the emitted
// caption list.
RewardRecord ellm_reward_multi(const std::vector<std::string>& transition_captions,
                               const SuggestionSet& goals, double threshold,
                               const Embedder& embedder);

struct HardcodedReward {
  double reward = 0.0;
  std::optional<std::string> matched_goal;
};

// Exact string-match reward used by the Oracle/Novelty/Uniform baselines:
// 1 when the transition caption equals one of the goals. When
// novelty_ledger is non-null, goals already achieved this episode pay zero.
HardcodedReward hardcoded_goal_reward(const std::optional<ActionSpec>& outcome,
                                      const SuggestionSet& goals,
                                      const EpisodeLedger* novelty_ledger);

// --- random network distillation ---

struct RndConfig {
  int hidden_width = 64;
  int output_dim = 32;
  nn::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
};

// Frozen random target network plus a predictor trained toward it; the
// prediction error is the novelty signal.
struct RndState {
  nn::Mlp target;
  nn::Mlp predictor;
  RndConfig config;
  std::int64_t adam_t = 0;

  static RndState init(int input_dim, const RndConfig& config, Rng& rng);
  std::uint64_t target_hash() const;
};

// || predictor(s) - target(s) ||. Read-only.
double rnd_novelty(const RndState& state, const Eigen::VectorXd& features);

// Returns the novelty of `features` and then takes one predictor gradient
// step toward the frozen target output.
double rnd_reward(RndState& state, const Eigen::VectorXd& features);

// --- active pretraining (k-nearest-neighbor state entropy) ---

// Fixed-capacity ring of state embeddings; the reward queries k nearest
// neighbors against its contents.
class AptBuffer {
 public:
  AptBuffer(int dimension, std::size_t capacity);

  void push(const Eigen::VectorXd& embedding);
  std::size_t size() const { return size_; }
  int dimension() const { return dimension_; }
  const Eigen::VectorXd& at(std::size_t i) const { return ring_[i]; }

 private:
  int dimension_;
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<Eigen::VectorXd> ring_;
};

// Indices of the k nearest buffer entries by L2 distance, nearest first.
std::vector<std::size_t> apt_nearest(const Eigen::VectorXd& query, const AptBuffer& buffer,
                                     int k);

// log(1 + mean L2 distance over the K nearest neighbors). The +1 offset keeps
// the reward finite as distances approach zero.
double apt_reward(const Eigen::VectorXd& query, const AptBuffer& buffer, int k);

// --- NovelD ---

// max(novelty(s') - alpha * novelty(s), 0) gated to the first visit of s'
// within the episode.
double noveld_reward(double novelty_s, double novelty_s_next, bool first_visit, double alpha);

}  // namespace ellm
