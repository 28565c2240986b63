#include "ellm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ellm/action.hpp"
#include "ellm/env.hpp"
#include "ellm/errors.hpp"
#include "ellm/features.hpp"
#include "ellm/gridcraft.hpp"
#include "ellm/housegrid.hpp"
#include "ellm/reports.hpp"
#include "ellm/text.hpp"

namespace ellm {

using nlohmann::json;

std::string to_string(Method method) {
  switch (method) {
    case Method::ellm: return "ellm";
    case Method::oracle: return "oracle";
    case Method::novelty: return "novelty";
    case Method::uniform: return "uniform";
    case Method::apt: return "apt";
    case Method::rnd: return "rnd";
    case Method::noveld: return "noveld";
    case Method::ellm_no_novelty: return "ellm_no_novelty";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::ellm, Method::oracle, Method::novelty, Method::uniform, Method::apt,
                   Method::rnd, Method::noveld, Method::ellm_no_novelty}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method: " + name);
}

bool method_uses_suggestions(Method method) {
  switch (method) {
    case Method::ellm:
    case Method::oracle:
    case Method::novelty:
    case Method::uniform:
    case Method::ellm_no_novelty:
      return true;
    default:
      return false;
  }
}

bool method_uses_similarity(Method method) {
  return method == Method::ellm || method == Method::ellm_no_novelty;
}

void RunConfig::validate() const {
  if (env_id != "gridcraft" && env_id != "housegrid") {
    throw ConfigError("unknown env id: " + env_id);
  }
  if (!method_uses_suggestions(method) && agent.goal_conditioned) {
    throw ConfigError(ellm::to_string(method) +
                      " has no goal conditioning; set goal_conditioned=false");
  }
  if (method == Method::oracle && env_id == "housegrid") {
    throw ConfigError("the oracle baseline is defined for gridcraft only");
  }
  if (env_id == "housegrid" && tasks_file.empty()) {
    throw ConfigError("housegrid runs need a task definition file");
  }
  if (threshold <= 0.0 || threshold > 1.0) {
    throw ConfigError("similarity threshold must be in (0, 1]");
  }
  if (transfer_mode != "none" && transfer_mode != "finetune" && transfer_mode != "guided") {
    throw ConfigError("unknown transfer mode: " + transfer_mode);
  }
  if (transfer_mode != "none" && env_id == "gridcraft") {
    const auto& tasks = gridcraft::downstream_tasks();
    if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) {
      throw ConfigError("unknown downstream task: " + task);
    }
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
}

std::string RunConfig::to_json() const {
  return json{
      {"env_id", env_id},
      {"method", ellm::to_string(method)},
      {"suggestor", suggestor},
      {"embedder", embedder},
      {"embed_dim", embed_dim},
      {"threshold", threshold},
      {"k", k},
      {"seeds", seeds},
      {"steps", steps},
      {"transfer_mode", transfer_mode},
      {"task", task},
      {"finetune_lr", finetune_lr},
      {"housegrid_task_id", housegrid_task_id},
      {"tasks_file", tasks_file},
      {"suggestor_match_accuracy", suggestor_match_accuracy},
      {"suggestor_mismatch_accuracy", suggestor_mismatch_accuracy},
      {"noise_config_file", noise_config_file},
      {"llm_model", llm_model},
      {"desk_env", desk_env},
      {"gridcraft_config_file", gridcraft_config_file},
      {"agent", json::parse(agent.to_json())},
      {"apt_k", apt_k},
      {"apt_minibatch", apt_minibatch},
      {"apt_memory", apt_memory},
      {"noveld_alpha", noveld_alpha},
      {"eval_episodes", eval_episodes},
      {"eval_trials", eval_trials},
      {"eval_epsilon", eval_epsilon},
      {"out_dir", out_dir},
      {"log_zero_rewards", log_zero_rewards},
      {"checkpoint_interval", checkpoint_interval},
  }.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunConfig c;
  c.env_id = j.value("env_id", c.env_id);
  if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
  c.suggestor = j.value("suggestor", c.suggestor);
  c.embedder = j.value("embedder", c.embedder);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.threshold = j.value("threshold", c.threshold);
  c.k = j.value("k", c.k);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.steps = j.value("steps", c.steps);
  c.transfer_mode = j.value("transfer_mode", c.transfer_mode);
  c.task = j.value("task", c.task);
  c.finetune_lr = j.value("finetune_lr", c.finetune_lr);
  c.housegrid_task_id = j.value("housegrid_task_id", c.housegrid_task_id);
  c.tasks_file = j.value("tasks_file", c.tasks_file);
  c.suggestor_match_accuracy = j.value("suggestor_match_accuracy", c.suggestor_match_accuracy);
  c.suggestor_mismatch_accuracy =
      j.value("suggestor_mismatch_accuracy", c.suggestor_mismatch_accuracy);
  c.noise_config_file = j.value("noise_config_file", c.noise_config_file);
  c.llm_model = j.value("llm_model", c.llm_model);
  c.desk_env = j.value("desk_env", c.desk_env);
  c.gridcraft_config_file = j.value("gridcraft_config_file", c.gridcraft_config_file);
  if (j.contains("agent")) c.agent = AgentConfig::from_json(j.at("agent").dump());
  c.apt_k = j.value("apt_k", c.apt_k);
  c.apt_minibatch = j.value("apt_minibatch", c.apt_minibatch);
  c.apt_memory = j.value("apt_memory", c.apt_memory);
  c.noveld_alpha = j.value("noveld_alpha", c.noveld_alpha);
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
  c.eval_trials = j.value("eval_trials", c.eval_trials);
  c.eval_epsilon = j.value("eval_epsilon", c.eval_epsilon);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.log_zero_rewards = j.value("log_zero_rewards", c.log_zero_rewards);
  c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

namespace {

struct EnvAdapter {
  std::unique_ptr<Environment> env;
  gridcraft::GridcraftEnv* grid = nullptr;
  housegrid::HousegridEnv* house = nullptr;
  housegrid::RearrangementTask task;
  std::vector<std::string> expressible;
  int feature_dim = 0;

  std::string caption_state(const Observation& obs) const {
    return grid ? caption_state_crafter(obs) : caption_state_housegrid(obs);
  }
  std::string caption_transition(const StepResult& step) const {
    return grid ? caption_transition_crafter(step.action_outcome)
                : caption_transition_housegrid(step.action_outcome);
  }
  std::vector<float> features(const Observation& obs) const {
    return grid ? gridcraft_features(obs) : housegrid_features(obs, task);
  }
};

EnvAdapter make_adapter(const RunConfig& config) {
  EnvAdapter adapter;
  if (config.env_id == "gridcraft") {
    gridcraft::GridcraftConfig env_config;
    if (!config.gridcraft_config_file.empty()) {
      env_config = gridcraft::GridcraftConfig::from_json_file(config.gridcraft_config_file);
    } else if (config.desk_env) {
      env_config = gridcraft::GridcraftConfig::desk();
    }
    auto env = std::make_unique<gridcraft::GridcraftEnv>(env_config);
    adapter.grid = env.get();
    adapter.env = std::move(env);
    adapter.feature_dim = gridcraft_feature_dim();
    for (const auto& action : adapter.env->actions()) {
      adapter.expressible.push_back(action.text());
    }
  } else {
    adapter.task = housegrid::load_task(config.tasks_file, config.housegrid_task_id);
    auto env = std::make_unique<housegrid::HousegridEnv>(adapter.task);
    adapter.house = env.get();
    adapter.env = std::move(env);
    adapter.feature_dim = housegrid_feature_dim(adapter.task);
    adapter.expressible = housegrid::HousegridEnv::expressible_goals(adapter.task);
  }
  return adapter;
}

std::unique_ptr<Embedder> make_embedder(const RunConfig& config, std::uint64_t seed) {
  if (config.embedder == "lexical") {
    return std::make_unique<LexicalEmbedder>(config.embed_dim);
  }
  if (config.embedder == "random_projection") {
    return std::make_unique<RandomProjectionEmbedder>(config.embed_dim,
                                                      split_seed(seed, "embedder"));
  }
  throw ConfigError("unknown embedder: " + config.embedder);
}

std::unique_ptr<Suggestor> make_suggestor(const RunConfig& config, std::uint64_t seed,
                                          const EnvAdapter& adapter, LlmClient* client) {
  switch (config.method) {
    case Method::ellm:
    case Method::ellm_no_novelty:
      if (adapter.grid) {
        if (config.suggestor == "scripted_oracle") {
          return std::make_unique<CrafterOracleSuggestor>(config.k);
        }
        if (config.suggestor == "llm_open_ended") {
          if (!client) throw ConfigError("llm_open_ended suggestor needs a completion client");
          return std::make_unique<CrafterLlmSuggestor>(*client, config.llm_model,
                                                       PromptTemplate::crafter_default(),
                                                       config.k);
        }
        throw ConfigError("unknown gridcraft suggestor: " + config.suggestor);
      } else {
        if (config.suggestor == "scripted_oracle") {
          return std::make_unique<HousegridScriptedSuggestor>(
              adapter.task, config.suggestor_match_accuracy, config.suggestor_mismatch_accuracy,
              seed);
        }
        if (config.suggestor == "llm_closed_form") {
          if (!client) throw ConfigError("llm_closed_form suggestor needs a completion client");
          return std::make_unique<HousegridLlmSuggestor>(adapter.task, *client, config.llm_model);
        }
        throw ConfigError("unknown housegrid suggestor: " + config.suggestor);
      }
    case Method::oracle:
      return std::make_unique<CrafterOracleSuggestor>(SIZE_MAX);
    case Method::novelty:
      return std::make_unique<NoveltySuggestor>(adapter.expressible);
    case Method::uniform:
      return std::make_unique<UniformSuggestor>(adapter.expressible, config.k,
                                                Rng(seed, "suggestor"));
    default:
      return nullptr;
  }
}

// Per-method intrinsic reward machinery that persists across the run.
struct IntrinsicState {
  std::optional<RndState> rnd;
  std::vector<Eigen::VectorXd> apt_memory;
  std::size_t apt_next = 0;
  std::set<std::uint64_t> visited_this_episode;
  Rng apt_rng;
  Rng noise_rng;
  std::optional<CaptionConfusion> confusion;
};

Eigen::VectorXd to_vector(const std::vector<float>& values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = static_cast<double>(values[static_cast<std::size_t>(i)]);
  }
  return v;
}

std::uint64_t feature_hash(const std::vector<float>& values) {
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(values.data()),
                                  values.size() * sizeof(float)));
}

double kb_intrinsic_reward(const RunConfig& config, IntrinsicState& state,
                           const std::vector<float>& prev_features,
                           const std::vector<float>& next_features) {
  switch (config.method) {
    case Method::rnd:
      return rnd_reward(*state.rnd, to_vector(next_features));
    case Method::apt: {
      const Eigen::VectorXd query = to_vector(next_features);
      double reward = 0.0;
      if (state.apt_memory.size() > static_cast<std::size_t>(config.apt_k)) {
        AptBuffer minibatch(static_cast<int>(query.size()),
                            static_cast<std::size_t>(config.apt_minibatch));
        for (int i = 0; i < config.apt_minibatch; ++i) {
          minibatch.push(state.apt_memory[state.apt_rng.next_below(state.apt_memory.size())]);
        }
        reward = apt_reward(query, minibatch, config.apt_k);
      }
      if (state.apt_memory.size() < config.apt_memory) {
        state.apt_memory.push_back(query);
      } else {
        state.apt_memory[state.apt_next] = query;
        state.apt_next = (state.apt_next + 1) % config.apt_memory;
      }
      return reward;
    }
    case Method::noveld: {
      const double novelty_prev = rnd_novelty(*state.rnd, to_vector(prev_features));
      const double novelty_next = rnd_reward(*state.rnd, to_vector(next_features));
      const bool first_visit =
          state.visited_this_episode.insert(feature_hash(next_features)).second;
      return noveld_reward(novelty_prev, novelty_next, first_visit, config.noveld_alpha);
    }
    default:
      return 0.0;
  }
}

struct LoopOptions {
  bool learn = true;
  bool transfer_task_reward = false;
  const DqnAgent* guide = nullptr;
};

// One seeded run of the Algorithm 1 loop (suggest -> filter -> act -> step ->
// reward -> buffer -> update), shared by pretraining and transfer.
RunArtifacts run_loop(const RunConfig& config, std::uint64_t seed, LlmClient* client,
                      EnvAdapter& adapter, DqnAgent& agent, const Embedder& embedder,
                      const LoopOptions& options) {
  RunArtifacts artifacts;
  artifacts.seed = seed;

  const bool use_suggestions = method_uses_suggestions(config.method);
  const bool similarity = method_uses_similarity(config.method);
  const bool novelty_filter = config.method == Method::ellm || config.method == Method::oracle ||
                              config.method == Method::novelty;

  std::unique_ptr<Suggestor> suggestor =
      use_suggestions ? make_suggestor(config, seed, adapter, client) : nullptr;

  IntrinsicState intrinsic;
  intrinsic.apt_rng = Rng(seed, "apt");
  intrinsic.noise_rng = Rng(seed, "noise");
  if (config.method == Method::rnd || config.method == Method::noveld) {
    Rng rnd_init(seed, "rnd-init");
    intrinsic.rnd = RndState::init(adapter.feature_dim, config.rnd, rnd_init);
  }
  if (!config.noise_config_file.empty()) {
    intrinsic.confusion = CaptionConfusion::from_json_file(config.noise_config_file);
  }

  Rng act_rng(seed, "act");
  Rng episode_seeds(seed, "episode-seeds");

  gridcraft::TaskProgress task_progress;
  double housegrid_best_correct = 0.0;

  GuidePolicy guide_policy;
  if (options.guide) {
    const DqnAgent* guide = options.guide;
    guide_policy = [guide](const Eigen::VectorXd& input) { return guide->greedy_action(input); };
    artifacts.guide_hash_before = guide->online().parameter_hash();
  }

  // Transfer goal text: the task subgoals as one sequence, fixed per run.
  std::string transfer_goal_text;
  if (options.transfer_task_reward && adapter.grid) {
    transfer_goal_text = join(gridcraft::task_subgoals(config.task), ", ");
  }

  Observation obs = adapter.env->reset(episode_seeds.engine()());
  std::vector<float> features_current = adapter.features(obs);
  std::string last_query_caption;
  bool have_query = false;
  SuggestionSet raw_suggestions;

  std::int64_t episode = 0;
  double episode_intrinsic = 0.0;
  double episode_extrinsic = 0.0;
  std::set<std::string> episode_achievements;

  const std::int64_t llm_calls_before = client ? client->network_calls() : 0;

  for (std::int64_t t = 0; t < config.steps; ++t) {
    const std::string caption = adapter.caption_state(obs);

    SuggestionSet active;
    if (use_suggestions) {
      // ELLM reuses the previous query while the state caption is unchanged;
      // the baselines re-query every step.
      const bool fresh_every_step = !similarity;
      if (fresh_every_step || !have_query || caption != last_query_caption) {
        raw_suggestions = suggestor->suggest(obs, t);
        last_query_caption = caption;
        have_query = true;
        SuggestionEvent event;
        event.t = t;
        event.episode = episode;
        event.source = ellm::to_string(raw_suggestions.source);
        event.caption_hash = fnv1a64(caption);
        event.goals = raw_suggestions.goals;
        event.context = obs;
        artifacts.suggestions.push_back(std::move(event));
      }
      active = novelty_filter ? filter_achieved(raw_suggestions, adapter.env->ledger())
                              : raw_suggestions;
      active.timestep = t;
    }

    int caption_id = 0;
    int goal_id = 0;
    if (agent.config().caption_conditioned) caption_id = agent.store().id_for(caption);
    if (agent.config().goal_conditioned) {
      const std::string goal_text =
          options.transfer_task_reward ? transfer_goal_text : active.joined();
      goal_id = agent.store().id_for(goal_text);
    }
    agent.begin_step(features_current, caption_id, goal_id, agent.store());

    const double epsilon =
        options.learn ? epsilon_at(t, config.steps, agent.config()) : config.eval_epsilon;
    const int action_index = agent.act(epsilon, act_rng, guide_policy ? &guide_policy : nullptr);
    const StepResult step =
        adapter.env->step(adapter.env->actions()[static_cast<std::size_t>(action_index)]);
    const std::vector<float> features_next = adapter.features(step.observation);

    double intrinsic_reward = 0.0;
    if (use_suggestions) {
      const std::string transition_caption = adapter.caption_transition(step);
      if (similarity) {
        std::vector<std::string> captions;
        if (intrinsic.confusion && !transition_caption.empty()) {
          captions = inject_noise(transition_caption, *intrinsic.confusion, intrinsic.noise_rng);
        } else {
          captions.push_back(transition_caption);
        }
        const RewardRecord record = ellm_reward_multi(captions, active, config.threshold, embedder);
        intrinsic_reward = record.reward;
        if (record.reward > 0.0 && record.matched_goal) {
          adapter.env->ledger().achieved_this_episode.insert(*record.matched_goal);
        }
        if (record.reward > 0.0 || config.log_zero_rewards) {
          RewardEvent event;
          event.t = t;
          event.episode = episode;
          event.caption = transition_caption;
          event.delta_max = record.delta_max;
          event.matched_goal = record.matched_goal.value_or("");
          event.threshold = record.threshold;
          event.reward = record.reward;
          event.context = obs;
          artifacts.rewards.push_back(std::move(event));
        }
      } else {
        const HardcodedReward record = hardcoded_goal_reward(
            step.action_outcome, active, novelty_filter ? &adapter.env->ledger() : nullptr);
        intrinsic_reward = record.reward;
        if (record.reward > 0.0 && record.matched_goal) {
          adapter.env->ledger().achieved_this_episode.insert(*record.matched_goal);
        }
        if (record.reward > 0.0 || config.log_zero_rewards) {
          RewardEvent event;
          event.t = t;
          event.episode = episode;
          event.caption = step.action_outcome ? step.action_outcome->text() : "";
          event.delta_max = record.reward;
          event.matched_goal = record.matched_goal.value_or("");
          event.threshold = 1.0;
          event.reward = record.reward;
          event.context = obs;
          artifacts.rewards.push_back(std::move(event));
        }
      }
    } else {
      intrinsic_reward = kb_intrinsic_reward(config, intrinsic, features_current, features_next);
    }

    double extrinsic_reward = 0.0;
    if (options.transfer_task_reward) {
      if (adapter.grid) {
        extrinsic_reward = gridcraft::downstream_task_reward(config.task, step,
                                                             adapter.grid->world(), task_progress);
      } else {
        const double correct = adapter.house->current_success_rate() *
                               static_cast<double>(adapter.task.objects.size());
        extrinsic_reward = std::max(0.0, correct - housegrid_best_correct) /
                           static_cast<double>(adapter.task.objects.size());
        housegrid_best_correct = std::max(housegrid_best_correct, correct);
      }
    }

    episode_intrinsic += intrinsic_reward;
    episode_extrinsic += extrinsic_reward;
    for (const auto& event : step.events) episode_achievements.insert(event);

    const double learning_reward =
        options.transfer_task_reward ? extrinsic_reward : intrinsic_reward;
    agent.end_step(action_index, learning_reward, step.done);

    if (options.learn && t >= agent.config().seed_frames &&
        (t + 1) % agent.config().update_every == 0 && agent.can_update()) {
      agent.update();
    }

    if (step.done) {
      EpisodeRow row;
      row.step = t + 1;
      row.episode = episode;
      row.unique_achievements = static_cast<int>(episode_achievements.size());
      row.intrinsic_return = episode_intrinsic;
      row.extrinsic_return = episode_extrinsic;
      row.success_rate = adapter.house ? adapter.house->current_success_rate() : 0.0;
      artifacts.episodes.push_back(row);

      episode += 1;
      episode_intrinsic = 0.0;
      episode_extrinsic = 0.0;
      episode_achievements.clear();
      task_progress = gridcraft::TaskProgress{};
      housegrid_best_correct = 0.0;
      intrinsic.visited_this_episode.clear();
      have_query = false;
      obs = adapter.env->reset(episode_seeds.engine()());
      features_current = adapter.features(obs);
    } else {
      obs = step.observation;
      features_current = features_next;
    }
  }

  if (options.guide) {
    artifacts.guide_hash_after = options.guide->online().parameter_hash();
  }
  artifacts.llm_network_calls = client ? client->network_calls() - llm_calls_before : 0;
  return artifacts;
}

double eval_episode_metric(const RunConfig& config, const EnvAdapter& adapter,
                           const std::set<std::string>& achievements, bool task_completed) {
  if (adapter.house) return adapter.house->current_success_rate();
  if (config.transfer_mode != "none") return task_completed ? 1.0 : 0.0;
  return static_cast<double>(achievements.size());
}

}  // namespace

MetricSummary summarize_trials(const std::vector<double>& trial_means) {
  MetricSummary summary;
  summary.trial_means = trial_means;
  if (trial_means.empty()) return summary;
  std::vector<double> sorted = trial_means;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : sorted) total += v;
  summary.mean = total / static_cast<double>(sorted.size());
  const std::size_t n = sorted.size();
  summary.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const std::size_t lo = n / 4;
  const std::size_t hi = n - n / 4;
  double iqm_total = 0.0;
  for (std::size_t i = lo; i < hi; ++i) iqm_total += sorted[i];
  summary.iqm = iqm_total / static_cast<double>(hi - lo);
  return summary;
}

MetricSummary evaluate(const RunConfig& config, DqnAgent& agent, std::uint64_t seed,
                       LlmClient* client) {
  EnvAdapter adapter = make_adapter(config);
  if (adapter.feature_dim != agent.obs_dim()) {
    throw CheckpointError("agent does not match this environment's feature dimension");
  }
  const bool use_suggestions = method_uses_suggestions(config.method);
  const bool similarity = method_uses_similarity(config.method);
  const bool novelty_filter = config.method == Method::ellm || config.method == Method::oracle ||
                              config.method == Method::novelty;
  std::unique_ptr<Suggestor> suggestor =
      use_suggestions ? make_suggestor(config, seed, adapter, client) : nullptr;

  std::string transfer_goal_text;
  if (config.transfer_mode != "none" && adapter.grid) {
    transfer_goal_text = join(gridcraft::task_subgoals(config.task), ", ");
  }

  Rng eval_rng(seed, "eval");
  Rng episode_seeds(seed, "eval-episode-seeds");

  std::vector<double> trial_means;
  for (int trial = 0; trial < config.eval_trials; ++trial) {
    double trial_total = 0.0;
    for (int ep = 0; ep < config.eval_episodes; ++ep) {
      Observation obs = adapter.env->reset(episode_seeds.engine()());
      std::set<std::string> achievements;
      gridcraft::TaskProgress task_progress;
      bool done = false;
      std::string last_caption;
      bool have_query = false;
      SuggestionSet raw;
      std::int64_t t = 0;
      while (!done) {
        const std::string caption = adapter.caption_state(obs);
        SuggestionSet active;
        if (use_suggestions) {
          if (!similarity || !have_query || caption != last_caption) {
            raw = suggestor->suggest(obs, t);
            last_caption = caption;
            have_query = true;
          }
          active = novelty_filter ? filter_achieved(raw, adapter.env->ledger()) : raw;
        }
        int caption_id = 0;
        int goal_id = 0;
        if (agent.config().caption_conditioned) caption_id = agent.store().id_for(caption);
        if (agent.config().goal_conditioned) {
          goal_id = agent.store().id_for(config.transfer_mode != "none" ? transfer_goal_text
                                                                        : active.joined());
        }
        agent.begin_step(adapter.features(obs), caption_id, goal_id, agent.store());
        const int action = agent.act(config.eval_epsilon, eval_rng, nullptr);
        const StepResult step =
            adapter.env->step(adapter.env->actions()[static_cast<std::size_t>(action)]);
        for (const auto& event : step.events) achievements.insert(event);
        if (config.transfer_mode != "none" && adapter.grid) {
          gridcraft::downstream_task_reward(config.task, step, adapter.grid->world(),
                                            task_progress);
        }
        // Keep the episode ledger current so the novelty filter behaves as in
        // training.
        if (use_suggestions && step.action_outcome) {
          const HardcodedReward record =
              hardcoded_goal_reward(step.action_outcome, active, nullptr);
          if (record.matched_goal) {
            adapter.env->ledger().achieved_this_episode.insert(*record.matched_goal);
          }
        }
        done = step.done;
        obs = step.observation;
        t += 1;
      }
      trial_total += eval_episode_metric(config, adapter, achievements, task_progress.done);
    }
    trial_means.push_back(trial_total / static_cast<double>(config.eval_episodes));
  }
  // Close the agent's episode tail so later training does not stack across
  // the evaluation boundary.
  agent.end_step(0, 0.0, true);
  return summarize_trials(trial_means);
}

RunArtifacts pretrain(const RunConfig& config, std::uint64_t seed, LlmClient* client) {
  config.validate();
  std::unique_ptr<Embedder> embedder = make_embedder(config, seed);
  EnvAdapter adapter = make_adapter(config);
  DqnAgent agent(config.agent, adapter.feature_dim,
                 static_cast<int>(adapter.env->actions().size()), *embedder, seed);

  LoopOptions options;
  RunArtifacts artifacts = run_loop(config, seed, client, adapter, agent, *embedder, options);
  artifacts.final_eval = evaluate(config, agent, seed, client);

  if (!config.out_dir.empty()) {
    artifacts.checkpoint_path = write_run_artifacts(config, artifacts, agent);
  }
  return artifacts;
}

std::vector<RunArtifacts> pretrain_all(const RunConfig& config, LlmClient* client) {
  config.validate();
  std::vector<RunArtifacts> runs;
  for (std::uint64_t seed : config.seeds) {
    runs.push_back(pretrain(config, seed, client));
  }
  if (!config.out_dir.empty()) {
    write_combined_reports(config, runs);
  }
  return runs;
}

RunArtifacts transfer(const RunConfig& config, const std::string& checkpoint_path,
                      std::uint64_t seed, LlmClient* client) {
  config.validate();
  if (config.transfer_mode == "none") {
    throw ConfigError("transfer requires transfer_mode finetune or guided");
  }
  std::unique_ptr<Embedder> embedder = make_embedder(config, seed);
  EnvAdapter adapter = make_adapter(config);

  LoopOptions options;
  options.transfer_task_reward = true;

  RunArtifacts artifacts;
  if (config.transfer_mode == "finetune") {
    DqnAgent agent = DqnAgent::load_checkpoint(checkpoint_path, *embedder);
    if (agent.obs_dim() != adapter.feature_dim) {
      throw CheckpointError("checkpoint feature dimension does not match the environment");
    }
    agent.set_lr(config.finetune_lr);
    artifacts = run_loop(config, seed, client, adapter, agent, *embedder, options);
    artifacts.final_eval = evaluate(config, agent, seed, client);
    if (!config.out_dir.empty()) {
      artifacts.checkpoint_path = write_run_artifacts(config, artifacts, agent);
    }
  } else {
    const DqnAgent guide = DqnAgent::load_checkpoint(checkpoint_path, *embedder);
    DqnAgent agent(config.agent, adapter.feature_dim,
                   static_cast<int>(adapter.env->actions().size()), *embedder, seed);
    if (guide.input_dim() != agent.input_dim()) {
      throw CheckpointError("guide checkpoint input dimension does not match the new agent");
    }
    options.guide = &guide;
    artifacts = run_loop(config, seed, client, adapter, agent, *embedder, options);
    artifacts.final_eval = evaluate(config, agent, seed, client);
    if (!config.out_dir.empty()) {
      artifacts.checkpoint_path = write_run_artifacts(config, artifacts, agent);
    }
  }
  return artifacts;
}

}  // namespace ellm
