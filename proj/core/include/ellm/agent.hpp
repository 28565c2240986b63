#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ellm/nn.hpp"
#include "ellm/replay.hpp"
#include "ellm/rng.hpp"

namespace ellm {

struct AgentConfig {
  double gamma = 0.99;
  int n_step = 3;
  int batch_size = 64;
  double lr = 6.25e-5;
  double target_tau = 1.0;          // hard copy
  int target_update_interval = 1000;  // updates between copies
  double epsilon_min = 0.01;
  double epsilon_decay_fraction = 0.2;  // linear decay over this fraction of the budget
  int update_every = 4;
  int seed_frames = 5000;
  int frame_stack = 4;
  int hidden_width = 512;
  std::size_t replay_capacity = 100000;
  bool caption_conditioned = true;
  bool goal_conditioned = true;

  static AgentConfig gridcraft_defaults() { return AgentConfig{}; }
  static AgentConfig housegrid_defaults();

  std::string to_json() const;
  static AgentConfig from_json(const std::string& text);
  std::uint64_t hash() const;
};

// Linear decay from 1.0 to epsilon_min over the first decay fraction of the
// step budget.
double epsilon_at(std::int64_t step, std::int64_t total_steps, const AgentConfig& config);

// Fixed-order concatenation [stacked obs | caption embedding | goal
// embedding]. Conditioned slots keep fixed arity: an absent value is a
// dimension error, an empty goal set embeds as the zero vector upstream.
Eigen::VectorXd assemble_input(const Eigen::VectorXd& obs_stack,
                               const std::optional<Eigen::VectorXd>& caption_embedding,
                               const std::optional<Eigen::VectorXd>& goal_embedding);

// Double-Q n-step targets: y = R + gamma^m * Q_target(s', argmax_a
// Q_online(s', a)) * (1 - done).
nn::Vector td_target(const std::vector<ReplayTransition>& batch,
                     const nn::DuelingQNetwork& online, const nn::DuelingQNetwork& target);

using GuidePolicy = std::function<int(const Eigen::VectorXd& input)>;

// Dueling double DQN with n-step returns over symbolic features, with
// optional caption and goal conditioning. The embedder must outlive the
// agent; its dimension fixes the conditioning slot widths.
class DqnAgent {
 public:
  DqnAgent(AgentConfig config, int obs_dim, int num_actions, const Embedder& embedder,
           std::uint64_t seed);

  const AgentConfig& config() const { return config_; }
  int obs_dim() const { return obs_dim_; }
  int embed_dim() const { return embed_dim_; }
  int num_actions() const { return num_actions_; }
  int input_dim() const;

  // Per-step flow: begin_step assembles the current input, act picks the
  // action, end_step records the transition.
  void begin_step(const std::vector<float>& obs, int caption_id, int goal_id,
                  const EmbeddingStore& store);
  const Eigen::VectorXd& current_input() const { return current_input_; }
  int act(double epsilon, Rng& rng, const GuidePolicy* guide = nullptr) const;
  void end_step(int action, double reward, bool done);

  bool can_update() const;
  // One optimizer step on a sampled batch; hard-copies the target network
  // every target_update_interval updates. Non-finite losses abort with a
  // diagnostic.
  double update();

  int greedy_action(const Eigen::VectorXd& input) const;
  std::int64_t updates() const { return updates_; }

  nn::DuelingQNetwork& online() { return online_; }
  const nn::DuelingQNetwork& online() const { return online_; }
  const nn::DuelingQNetwork& target() const { return target_; }
  ReplayBuffer& replay() { return replay_; }
  EmbeddingStore& store() { return store_; }

  void set_lr(double lr) { config_.lr = lr; }

  // Versioned binary checkpoint: config JSON, dimensions, online parameters.
  void save_checkpoint(const std::string& path) const;
  static DqnAgent load_checkpoint(const std::string& path, const Embedder& embedder);

 private:
  AgentConfig config_;
  int obs_dim_;
  int embed_dim_;
  int num_actions_;
  EmbeddingStore store_;
  ReplayBuffer replay_;
  nn::DuelingQNetwork online_;
  nn::DuelingQNetwork target_;
  Rng rng_;
  Eigen::VectorXd current_input_;
  std::vector<std::vector<float>> stack_frames_;  // current episode tail
  std::vector<float> pending_obs_;
  int pending_caption_id_ = 0;
  int pending_goal_id_ = 0;
  std::int64_t steps_seen_ = 0;
  std::int64_t updates_ = 0;
};

}  // namespace ellm
