#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ellm/agent.hpp"
#include "ellm/captioning.hpp"
#include "ellm/embedding.hpp"
#include "ellm/llm_client.hpp"
#include "ellm/observation.hpp"
#include "ellm/reward.hpp"
#include "ellm/suggestion.hpp"

namespace ellm {

enum class Method { ellm, oracle, novelty, uniform, apt, rnd, noveld, ellm_no_novelty };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

bool method_uses_suggestions(Method method);
bool method_uses_similarity(Method method);

struct RunConfig {
  std::string env_id = "gridcraft";  // gridcraft | housegrid
  Method method = Method::ellm;
  std::string suggestor = "scripted_oracle";  // scripted_oracle | llm_open_ended | llm_closed_form
  std::string embedder = "lexical";           // lexical | random_projection
  int embed_dim = 128;
  double threshold = 0.99;  // drops to 0.5 on the noisy-caption path
  std::size_t k = 7;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::int64_t steps = 200000;

  std::string transfer_mode = "none";  // none | finetune | guided
  std::string task;                    // downstream task id (gridcraft) or "ground_truth"
  double finetune_lr = 2e-5;

  int housegrid_task_id = 1;
  std::string tasks_file;
  double suggestor_match_accuracy = 1.0;
  double suggestor_mismatch_accuracy = 1.0;

  std::string noise_config_file;  // confusion matrix; enables the noisy-caption path
  std::string llm_model = "code-davinci-002";

  bool desk_env = true;  // small dense gridcraft map for CPU-scale runs
  std::string gridcraft_config_file;

  AgentConfig agent;

  int apt_k = 12;
  int apt_minibatch = 128;
  std::size_t apt_memory = 8192;
  double noveld_alpha = 0.5;
  RndConfig rnd;

  int eval_episodes = 10;
  int eval_trials = 10;
  double eval_epsilon = 0.01;

  std::string out_dir;  // "" keeps artifacts in memory only
  bool log_zero_rewards = false;
  std::int64_t checkpoint_interval = 0;  // 0: final checkpoint only

  void validate() const;
  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
};

struct RewardEvent {
  std::int64_t t = 0;
  std::int64_t episode = 0;
  std::string caption;
  double delta_max = 0.0;
  std::string matched_goal;
  double threshold = 0.0;
  double reward = 0.0;
  Observation context;  // observation the active suggestions were built from
};

struct SuggestionEvent {
  std::int64_t t = 0;
  std::int64_t episode = 0;
  std::string source;
  std::uint64_t caption_hash = 0;
  std::vector<std::string> goals;
  Observation context;
};

struct EpisodeRow {
  std::int64_t step = 0;     // global env step at episode end
  std::int64_t episode = 0;  // per-seed episode index
  int unique_achievements = 0;
  double intrinsic_return = 0.0;
  double extrinsic_return = 0.0;
  double success_rate = 0.0;  // housegrid only
};

struct MetricSummary {
  double mean = 0.0;
  double median = 0.0;
  double iqm = 0.0;
  std::vector<double> trial_means;
};

struct RunArtifacts {
  std::uint64_t seed = 0;
  std::vector<EpisodeRow> episodes;
  std::vector<RewardEvent> rewards;
  std::vector<SuggestionEvent> suggestions;
  MetricSummary final_eval;        // unique achievements (gridcraft) or success rate
  std::string checkpoint_path;     // set when out_dir given
  std::int64_t llm_network_calls = 0;
  std::uint64_t guide_hash_before = 0;  // guided transfer only
  std::uint64_t guide_hash_after = 0;
};

// Pretrains one seed per Algorithm 1. The optional client backs LLM
// suggestors; scripted suggestors ignore it.
RunArtifacts pretrain(const RunConfig& config, std::uint64_t seed, LlmClient* client = nullptr);

// Runs every seed in config.seeds and, when out_dir is set, writes combined
// reports.
std::vector<RunArtifacts> pretrain_all(const RunConfig& config, LlmClient* client = nullptr);

// Evaluation protocol: trials x episodes greedy(-ish) rollouts; the metric is
// unique achievements per episode on gridcraft and final success rate on
// housegrid.
MetricSummary evaluate(const RunConfig& config, DqnAgent& agent, std::uint64_t seed,
                       LlmClient* client = nullptr);

// Transfer to a downstream task: "finetune" continues the checkpoint at the
// finetune learning rate, "guided" trains a fresh agent whose epsilon-greedy
// exploration mixes in the frozen checkpoint's greedy actions.
RunArtifacts transfer(const RunConfig& config, const std::string& checkpoint_path,
                      std::uint64_t seed, LlmClient* client = nullptr);

MetricSummary summarize_trials(const std::vector<double>& trial_means);

}  // namespace ellm
