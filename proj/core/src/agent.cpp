#include "ellm/agent.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ellm/errors.hpp"

namespace ellm {

using nlohmann::json;

AgentConfig AgentConfig::housegrid_defaults() {
  AgentConfig c;
  c.batch_size = 256;
  c.lr = 1e-4;
  c.epsilon_min = 0.1;
  return c;
}

std::string AgentConfig::to_json() const {
  return json{
      {"gamma", gamma},
      {"n_step", n_step},
      {"batch_size", batch_size},
      {"lr", lr},
      {"target_tau", target_tau},
      {"target_update_interval", target_update_interval},
      {"epsilon_min", epsilon_min},
      {"epsilon_decay_fraction", epsilon_decay_fraction},
      {"update_every", update_every},
      {"seed_frames", seed_frames},
      {"frame_stack", frame_stack},
      {"hidden_width", hidden_width},
      {"replay_capacity", replay_capacity},
      {"caption_conditioned", caption_conditioned},
      {"goal_conditioned", goal_conditioned},
  }.dump();
}

AgentConfig AgentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  AgentConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.n_step = j.value("n_step", c.n_step);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.target_tau = j.value("target_tau", c.target_tau);
  c.target_update_interval = j.value("target_update_interval", c.target_update_interval);
  c.epsilon_min = j.value("epsilon_min", c.epsilon_min);
  c.epsilon_decay_fraction = j.value("epsilon_decay_fraction", c.epsilon_decay_fraction);
  c.update_every = j.value("update_every", c.update_every);
  c.seed_frames = j.value("seed_frames", c.seed_frames);
  c.frame_stack = j.value("frame_stack", c.frame_stack);
  c.hidden_width = j.value("hidden_width", c.hidden_width);
  c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
  c.caption_conditioned = j.value("caption_conditioned", c.caption_conditioned);
  c.goal_conditioned = j.value("goal_conditioned", c.goal_conditioned);
  return c;
}

std::uint64_t AgentConfig::hash() const { return fnv1a64(to_json()); }

double epsilon_at(std::int64_t step, std::int64_t total_steps, const AgentConfig& config) {
  const double decay_steps =
      config.epsilon_decay_fraction * static_cast<double>(std::max<std::int64_t>(total_steps, 1));
  if (decay_steps <= 0.0) return config.epsilon_min;
  const double progress = static_cast<double>(step) / decay_steps;
  if (progress >= 1.0) return config.epsilon_min;
  return 1.0 + (config.epsilon_min - 1.0) * progress;
}

Eigen::VectorXd assemble_input(const Eigen::VectorXd& obs_stack,
                               const std::optional<Eigen::VectorXd>& caption_embedding,
                               const std::optional<Eigen::VectorXd>& goal_embedding) {
  Eigen::Index total = obs_stack.size();
  if (caption_embedding) total += caption_embedding->size();
  if (goal_embedding) total += goal_embedding->size();
  Eigen::VectorXd input(total);
  input.head(obs_stack.size()) = obs_stack;
  Eigen::Index offset = obs_stack.size();
  if (caption_embedding) {
    input.segment(offset, caption_embedding->size()) = *caption_embedding;
    offset += caption_embedding->size();
  }
  if (goal_embedding) {
    input.segment(offset, goal_embedding->size()) = *goal_embedding;
  }
  return input;
}

nn::Vector td_target(const std::vector<ReplayTransition>& batch,
                     const nn::DuelingQNetwork& online, const nn::DuelingQNetwork& target) {
  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  nn::Matrix bootstrap_inputs(batch_size, online.input_dim());
  for (Eigen::Index i = 0; i < batch_size; ++i) {
    const ReplayTransition& t = batch[static_cast<std::size_t>(i)];
    bootstrap_inputs.row(i) =
        assemble_input(t.bootstrap_obs_stack, t.bootstrap_caption_embedding,
                       t.bootstrap_goal_embedding)
            .transpose();
  }
  // Action selection with online parameters, evaluation with target
  // parameters.
  const nn::Matrix online_q = online.q_values(bootstrap_inputs);
  const nn::Matrix target_q = target.q_values(bootstrap_inputs);

  nn::Vector targets(batch_size);
  for (Eigen::Index i = 0; i < batch_size; ++i) {
    const ReplayTransition& t = batch[static_cast<std::size_t>(i)];
    int best = 0;
    for (int a = 1; a < online_q.cols(); ++a) {
      if (online_q(i, a) > online_q(i, best)) best = a;
    }
    const double bootstrap = t.done ? 0.0 : target_q(i, best);
    targets(i) = t.n_step_return + t.discount_power * bootstrap * (t.done ? 0.0 : 1.0);
  }
  return targets;
}

DqnAgent::DqnAgent(AgentConfig config, int obs_dim, int num_actions, const Embedder& embedder,
                   std::uint64_t seed)
    : config_(config),
      obs_dim_(obs_dim),
      embed_dim_(embedder.dimension()),
      num_actions_(num_actions),
      store_(embedder),
      replay_(config.replay_capacity, obs_dim, config.frame_stack, config.n_step, config.gamma),
      rng_(seed, "agent") {
  Rng init_rng(seed, "agent-init");
  online_ = nn::DuelingQNetwork(input_dim(), config_.hidden_width, num_actions_, init_rng);
  target_ = online_;
  current_input_ = Eigen::VectorXd::Zero(input_dim());
}

int DqnAgent::input_dim() const {
  int dim = obs_dim_ * config_.frame_stack;
  if (config_.caption_conditioned) dim += embed_dim_;
  if (config_.goal_conditioned) dim += embed_dim_;
  return dim;
}

void DqnAgent::begin_step(const std::vector<float>& obs, int caption_id, int goal_id,
                          const EmbeddingStore& store) {
  if (static_cast<int>(obs.size()) != obs_dim_) {
    throw std::invalid_argument("observation feature dimension drift");
  }
  pending_obs_ = obs;
  pending_caption_id_ = caption_id;
  pending_goal_id_ = goal_id;

  // The current input stacks the most recent frames including this one; the
  // replay buffer rebuilds the same stack at sample time.
  stack_frames_.push_back(obs);
  if (static_cast<int>(stack_frames_.size()) > config_.frame_stack) {
    stack_frames_.erase(stack_frames_.begin());
  }
  Eigen::VectorXd obs_stack(static_cast<Eigen::Index>(obs_dim_) * config_.frame_stack);
  for (int slot = 0; slot < config_.frame_stack; ++slot) {
    const int source = std::max(0, static_cast<int>(stack_frames_.size()) - config_.frame_stack + slot);
    for (int d = 0; d < obs_dim_; ++d) {
      obs_stack(static_cast<Eigen::Index>(slot) * obs_dim_ + d) =
          static_cast<double>(stack_frames_[static_cast<std::size_t>(source)][static_cast<std::size_t>(d)]);
    }
  }
  std::optional<Eigen::VectorXd> caption;
  std::optional<Eigen::VectorXd> goal;
  if (config_.caption_conditioned) caption = store.vec(caption_id);
  if (config_.goal_conditioned) goal = store.vec(goal_id);
  current_input_ = assemble_input(obs_stack, caption, goal);
}

int DqnAgent::act(double epsilon, Rng& rng, const GuidePolicy* guide) const {
  if (epsilon > 0.0 && rng.next_unit() < epsilon) {
    if (guide && *guide && rng.next_bool(0.5)) {
      return (*guide)(current_input_);
    }
    return static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_actions_)));
  }
  return greedy_action(current_input_);
}

int DqnAgent::greedy_action(const Eigen::VectorXd& input) const {
  const nn::Vector q = online_.q_values_single(input);
  int best = 0;
  for (int a = 1; a < q.size(); ++a) {
    if (q(a) > q(best)) best = a;  // ties keep the lowest index
  }
  return best;
}

void DqnAgent::end_step(int action, double reward, bool done) {
  replay_.push(pending_obs_, pending_caption_id_, pending_goal_id_, action, reward, done);
  steps_seen_ += 1;
  if (done) stack_frames_.clear();
}

bool DqnAgent::can_update() const {
  return replay_.size() >= static_cast<std::size_t>(config_.batch_size);
}

double DqnAgent::update() {
  std::vector<ReplayTransition> batch;
  batch.reserve(static_cast<std::size_t>(config_.batch_size));
  for (int i = 0; i < config_.batch_size; ++i) {
    batch.push_back(
        replay_.sample(rng_, store_, config_.caption_conditioned, config_.goal_conditioned));
  }
  const nn::Vector targets = td_target(batch, online_, target_);

  nn::Matrix inputs(config_.batch_size, input_dim());
  std::vector<int> actions(static_cast<std::size_t>(config_.batch_size));
  for (int i = 0; i < config_.batch_size; ++i) {
    const ReplayTransition& t = batch[static_cast<std::size_t>(i)];
    inputs.row(i) =
        assemble_input(t.obs_stack, t.caption_embedding, t.goal_embedding).transpose();
    actions[static_cast<std::size_t>(i)] = t.action_index;
  }

  const double loss = online_.loss_and_grad(inputs, actions, targets);
  if (!std::isfinite(loss)) {
    std::ostringstream dump;
    dump << "non-finite DQN loss at update " << updates_ << ": loss=" << loss
         << " targets=[" << targets.minCoeff() << ", " << targets.maxCoeff() << "]"
         << " returns=[" << batch.front().n_step_return << " ...]";
    throw std::runtime_error(dump.str());
  }
  nn::AdamConfig adam;
  adam.lr = config_.lr;
  online_.adam_step(adam);
  updates_ += 1;
  if (updates_ % config_.target_update_interval == 0) {
    target_ = online_;  // tau = 1.0 hard copy
  }
  return loss;
}

// --- checkpoints ---

namespace {
constexpr char kCheckpointMagic[8] = {'E', 'L', 'L', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}
}  // namespace

void DqnAgent::save_checkpoint(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod(out, kCheckpointVersion);
  const std::string config_json = config_.to_json();
  write_pod(out, static_cast<std::uint64_t>(config_.hash()));
  write_pod(out, static_cast<std::uint32_t>(config_json.size()));
  out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));
  write_pod(out, static_cast<std::int32_t>(obs_dim_));
  write_pod(out, static_cast<std::int32_t>(embed_dim_));
  write_pod(out, static_cast<std::int32_t>(num_actions_));
  const std::vector<double> params = online_.flatten();
  write_pod(out, static_cast<std::uint64_t>(params.size()));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw CheckpointError("short write while saving checkpoint: " + path);
}

DqnAgent DqnAgent::load_checkpoint(const std::string& path, const Embedder& embedder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw CheckpointError("not an agent checkpoint: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto config_hash = read_pod<std::uint64_t>(in);
  const auto config_len = read_pod<std::uint32_t>(in);
  std::string config_json(config_len, '\0');
  in.read(config_json.data(), config_len);
  AgentConfig config = AgentConfig::from_json(config_json);
  if (config.hash() != config_hash) {
    throw CheckpointError("checkpoint config hash mismatch: " + path);
  }
  const auto obs_dim = read_pod<std::int32_t>(in);
  const auto embed_dim = read_pod<std::int32_t>(in);
  const auto num_actions = read_pod<std::int32_t>(in);
  if (embedder.dimension() != embed_dim) {
    throw CheckpointError("checkpoint embedding dimension mismatch");
  }
  DqnAgent agent(config, obs_dim, num_actions, embedder, /*seed=*/0);
  const auto param_count = read_pod<std::uint64_t>(in);
  std::vector<double> params(param_count);
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(param_count * sizeof(double)));
  if (!in) throw CheckpointError("truncated checkpoint: " + path);
  agent.online_.unflatten(params);
  agent.target_ = agent.online_;
  return agent;
}

}  // namespace ellm
