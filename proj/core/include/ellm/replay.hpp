#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellm/embedding.hpp"
#include "ellm/rng.hpp"

namespace ellm {

// Interns caption/goal texts so replay stores small ids instead of vectors.
// Id 0 is the zero embedding (empty text).
class EmbeddingStore {
 public:
  explicit EmbeddingStore(const Embedder& embedder);

  int id_for(const std::string& text);
  const Eigen::VectorXd& vec(int id) const { return vectors_[static_cast<std::size_t>(id)]; }
  int dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  const Embedder& embedder_;
  int dimension_;
  std::map<std::string, int> ids_;
  std::vector<Eigen::VectorXd> vectors_;
};

// One sampled n-step transition, fully materialized.
struct ReplayTransition {
  Eigen::VectorXd obs_stack;  // frame_stack frames, oldest first
  std::optional<Eigen::VectorXd> caption_embedding;
  std::optional<Eigen::VectorXd> goal_embedding;
  int action_index = 0;
  double n_step_return = 0.0;
  double discount_power = 1.0;  // gamma^m over the realized steps
  bool done = false;
  Eigen::VectorXd bootstrap_obs_stack;
  std::optional<Eigen::VectorXd> bootstrap_caption_embedding;
  std::optional<Eigen::VectorXd> bootstrap_goal_embedding;
};

// Ring buffer of per-step frames with n-step return assembly. Frames store
// float features and interned embedding ids; transitions are materialized at
// sample time by re-stacking consecutive frames of the same episode.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int frame_stack, int n_step, double gamma);

  // Push the frame observed at this step together with the action taken and
  // the reward received. `done` flags episode termination (including caps).
  void push(const std::vector<float>& obs, int caption_id, int goal_id, int action, double reward,
            bool done);

  // Number of finalized transitions currently samplable.
  std::size_t size() const { return finalized_count_; }
  int obs_dim() const { return obs_dim_; }
  int frame_stack() const { return frame_stack_; }

  ReplayTransition sample(Rng& rng, const EmbeddingStore& store, bool caption_conditioned,
                          bool goal_conditioned) const;

 private:
  struct Frame {
    std::vector<float> obs;
    int caption_id = 0;
    int goal_id = 0;
    int action = 0;
    float reward = 0.0f;
    bool episode_start = false;
    // Finalized n-step fields.
    bool finalized = false;
    float n_return = 0.0f;
    float discount_power = 1.0f;
    std::uint8_t bootstrap_offset = 0;
    bool done = false;
  };

  Frame& frame(std::int64_t index) { return ring_[static_cast<std::size_t>(index % capacity_)]; }
  const Frame& frame(std::int64_t index) const {
    return ring_[static_cast<std::size_t>(index % capacity_)];
  }
  void finalize(std::int64_t index, std::int64_t steps, bool terminal);
  Eigen::VectorXd build_stack(std::int64_t index) const;

  std::size_t capacity_;
  int obs_dim_;
  int frame_stack_;
  int n_step_;
  double gamma_;
  std::vector<Frame> ring_;
  std::int64_t next_index_ = 0;  // absolute index of the next frame
  std::int64_t finalized_count_ = 0;
  std::vector<std::int64_t> pending_;
  bool next_is_episode_start_ = true;
};

}  // namespace ellm
