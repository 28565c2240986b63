#include "ellm/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace ellm {

EmbeddingStore::EmbeddingStore(const Embedder& embedder)
    : embedder_(embedder), dimension_(embedder.dimension()) {
  vectors_.push_back(Eigen::VectorXd::Zero(dimension_));  // id 0: empty text
  ids_[""] = 0;
}

int EmbeddingStore::id_for(const std::string& text) {
  auto it = ids_.find(text);
  if (it != ids_.end()) return it->second;
  const EmbeddingVector embedded = embedder_.embed(text);
  Eigen::VectorXd vec(dimension_);
  for (int i = 0; i < dimension_; ++i) vec(i) = embedded.components[static_cast<std::size_t>(i)];
  const int id = static_cast<int>(vectors_.size());
  vectors_.push_back(std::move(vec));
  ids_[text] = id;
  return id;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int frame_stack, int n_step,
                           double gamma)
    : capacity_(capacity),
      obs_dim_(obs_dim),
      frame_stack_(frame_stack),
      n_step_(n_step),
      gamma_(gamma) {
  if (capacity_ <= static_cast<std::size_t>(n_step_) + 1) {
    throw std::invalid_argument("replay capacity must exceed n_step + 1");
  }
  ring_.resize(capacity_);
}

void ReplayBuffer::finalize(std::int64_t index, std::int64_t steps, bool terminal) {
  Frame& f = frame(index);
  double n_return = 0.0;
  double discount = 1.0;
  for (std::int64_t j = 0; j < steps; ++j) {
    n_return += discount * static_cast<double>(frame(index + j).reward);
    discount *= gamma_;
  }
  f.n_return = static_cast<float>(n_return);
  f.discount_power = static_cast<float>(discount);
  f.bootstrap_offset = terminal ? 0 : static_cast<std::uint8_t>(steps);
  f.done = terminal;
  f.finalized = true;
}

void ReplayBuffer::push(const std::vector<float>& obs, int caption_id, int goal_id, int action,
                        double reward, bool done) {
  if (static_cast<int>(obs.size()) != obs_dim_) {
    throw std::invalid_argument("replay push: observation feature dimension drift");
  }
  Frame& f = frame(next_index_);
  f.obs = obs;
  f.caption_id = caption_id;
  f.goal_id = goal_id;
  f.action = action;
  f.reward = static_cast<float>(reward);
  f.episode_start = next_is_episode_start_;
  f.finalized = false;
  next_is_episode_start_ = false;

  pending_.push_back(next_index_);
  next_index_ += 1;

  if (done) {
    const std::int64_t last = next_index_ - 1;
    for (std::int64_t p : pending_) {
      if (last - p >= n_step_) {
        // The full window fits before the terminal step; bootstrap normally.
        finalize(p, n_step_, false);
      } else {
        finalize(p, last - p + 1, true);
      }
    }
    pending_.clear();
    next_is_episode_start_ = true;
  } else if (pending_.size() == static_cast<std::size_t>(n_step_) + 1) {
    finalize(pending_.front(), n_step_, false);
    pending_.erase(pending_.begin());
  }

  const std::int64_t oldest = std::max<std::int64_t>(0, next_index_ - static_cast<std::int64_t>(capacity_));
  finalized_count_ = next_index_ - static_cast<std::int64_t>(pending_.size()) - oldest;
}

Eigen::VectorXd ReplayBuffer::build_stack(std::int64_t index) const {
  const std::int64_t oldest =
      std::max<std::int64_t>(0, next_index_ - static_cast<std::int64_t>(capacity_));
  std::vector<std::int64_t> chain;  // newest first
  std::int64_t cursor = index;
  chain.push_back(cursor);
  while (static_cast<int>(chain.size()) < frame_stack_) {
    if (frame(cursor).episode_start || cursor - 1 < oldest) break;
    cursor -= 1;
    chain.push_back(cursor);
  }

  Eigen::VectorXd stacked(static_cast<std::int64_t>(frame_stack_) * obs_dim_);
  const int collected = static_cast<int>(chain.size());
  for (int slot = 0; slot < frame_stack_; ++slot) {
    // Oldest first; missing history repeats the earliest collected frame.
    const int offset_from_newest = frame_stack_ - 1 - slot;
    const std::int64_t source =
        chain[static_cast<std::size_t>(std::min(offset_from_newest, collected - 1))];
    const Frame& f = frame(source);
    for (int d = 0; d < obs_dim_; ++d) {
      stacked(static_cast<std::int64_t>(slot) * obs_dim_ + d) = static_cast<double>(f.obs[static_cast<std::size_t>(d)]);
    }
  }
  return stacked;
}

ReplayTransition ReplayBuffer::sample(Rng& rng, const EmbeddingStore& store,
                                      bool caption_conditioned, bool goal_conditioned) const {
  if (finalized_count_ <= 0) throw std::logic_error("replay sample from empty buffer");
  const std::int64_t oldest =
      std::max<std::int64_t>(0, next_index_ - static_cast<std::int64_t>(capacity_));
  const std::int64_t index =
      oldest + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(finalized_count_)));
  const Frame& f = frame(index);

  ReplayTransition t;
  t.obs_stack = build_stack(index);
  if (caption_conditioned) t.caption_embedding = store.vec(f.caption_id);
  if (goal_conditioned) t.goal_embedding = store.vec(f.goal_id);
  t.action_index = f.action;
  t.n_step_return = static_cast<double>(f.n_return);
  t.discount_power = static_cast<double>(f.discount_power);
  t.done = f.done;
  const std::int64_t bootstrap_index = f.done ? index : index + f.bootstrap_offset;
  t.bootstrap_obs_stack = build_stack(bootstrap_index);
  const Frame& bootstrap = frame(bootstrap_index);
  if (caption_conditioned) t.bootstrap_caption_embedding = store.vec(bootstrap.caption_id);
  if (goal_conditioned) t.bootstrap_goal_embedding = store.vec(bootstrap.goal_id);
  return t;
}

}  // namespace ellm
