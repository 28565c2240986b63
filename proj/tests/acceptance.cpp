// Acceptance suite: one pass/fail line per criterion, selectable with
// --criteria N,M,...; any failure sets a nonzero exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ellm/action.hpp"
#include "ellm/agent.hpp"
#include "ellm/analyze.hpp"
#include "ellm/captioning.hpp"
#include "ellm/embedding.hpp"
#include "ellm/errors.hpp"
#include "ellm/gridcraft.hpp"
#include "ellm/harness.hpp"
#include "ellm/llm_client.hpp"
#include "ellm/reward.hpp"
#include "ellm/suggestion.hpp"

#include "fake_transport.hpp"

using namespace ellm;

namespace {

const std::string kDataDir = ELLM_DATA_DIR;
const std::string kOutDir = ELLM_TEST_OUT_DIR;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// --- criterion 1: similarity reward vs brute-force oracle, exact equality ---

std::string random_text(Rng& rng, int vocabulary) {
  std::string text;
  const int words = 1 + static_cast<int>(rng.next_below(4));
  for (int w = 0; w < words; ++w) {
    if (w) text += " ";
    text += "word" + std::to_string(rng.next_below(static_cast<std::uint64_t>(vocabulary)));
  }
  return text;
}

bool criterion_reward_semantics(std::string& detail) {
  LexicalEmbedder embedder(128);
  Rng rng(515151);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 10000; ++trial) {
    const std::string caption = random_text(rng, 60);
    std::vector<std::string> raw;
    const int count = static_cast<int>(rng.next_below(6));
    for (int g = 0; g < count; ++g) raw.push_back(random_text(rng, 60));
    const double threshold = 0.05 + 0.95 * rng.next_unit();
    const SuggestionSet goals =
        SuggestionSet::make(raw, SuggestionSource::scripted_oracle, 0, SIZE_MAX);

    // Brute force: raw pairwise cosines from components, maximum, gate.
    const EmbeddingVector u = embedder.embed(caption);
    bool any = false;
    double delta_max = 0.0;
    for (const auto& goal : goals.goals) {
      const EmbeddingVector v = embedder.embed(goal);
      double dot = 0.0, uu = 0.0, vv = 0.0;
      for (std::size_t i = 0; i < u.components.size(); ++i) {
        dot += u.components[i] * v.components[i];
        uu += u.components[i] * u.components[i];
        vv += v.components[i] * v.components[i];
      }
      const double nu = std::sqrt(uu), nv = std::sqrt(vv);
      const double delta = (nu == 0.0 || nv == 0.0) ? 0.0 : dot / (nu * nv);
      if (!any || delta > delta_max) delta_max = delta;
      any = true;
    }
    const double expected_reward =
        (any && !caption.empty() && delta_max > threshold) ? delta_max : 0.0;
    const double expected_delta = (any && !caption.empty()) ? delta_max : 0.0;

    const RewardRecord record = ellm_reward(caption, goals, threshold, embedder);
    if (record.reward != expected_reward || record.delta_max != expected_delta) {
      detail = "mismatch at trial " + std::to_string(trial);
      return false;
    }
    if ((record.reward > 0.0) != (record.delta_max > threshold)) {
      detail = "gating violation at trial " + std::to_string(trial);
      return false;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  out << "10000 triples exact in " << seconds << " s";
  detail = out.str();
  return seconds < 5.0;
}

// --- criterion 2: novelty filter end-to-end audit ---

RunConfig audit_config(Method method) {
  RunConfig config;
  config.env_id = "gridcraft";
  config.method = method;
  config.seeds = {1};
  config.eval_episodes = 1;
  config.eval_trials = 1;
  config.agent.hidden_width = 16;
  config.agent.frame_stack = 2;
  config.agent.batch_size = 16;
  config.agent.epsilon_min = 1.0;  // random policy
  config.agent.seed_frames = 1 << 30;  // no updates

  // Longer episodes make same-goal repeats likely for the ablation.
  gridcraft::GridcraftConfig env = gridcraft::GridcraftConfig::desk();
  env.episode_cap = 1000;
  const std::string path = kOutDir + "/audit_gridcraft.json";
  std::ofstream out(path);
  out << env.to_json();
  out.close();
  config.gridcraft_config_file = path;
  return config;
}

bool criterion_novelty_filter(std::string& detail) {
  RunConfig config = audit_config(Method::ellm);
  config.steps = 100 * 1000;  // about 100 capped episodes
  const RunArtifacts filtered = pretrain(config, 21);

  std::int64_t episodes = filtered.episodes.size();
  if (episodes < 100) {
    detail = "only " + std::to_string(episodes) + " episodes audited";
    return false;
  }
  std::set<std::pair<std::int64_t, std::string>> seen;
  for (const auto& event : filtered.rewards) {
    if (event.reward <= 0.0) continue;
    if (!seen.emplace(event.episode, event.matched_goal).second) {
      detail = "repeated reward for goal '" + event.matched_goal + "'";
      return false;
    }
  }

  RunConfig ablation = audit_config(Method::ellm_no_novelty);
  ablation.steps = config.steps;
  const RunArtifacts repeated = pretrain(ablation, 21);
  std::set<std::pair<std::int64_t, std::string>> pairs;
  std::int64_t repeats = 0;
  for (const auto& event : repeated.rewards) {
    if (event.reward > 0.0 && !pairs.emplace(event.episode, event.matched_goal).second) {
      ++repeats;
    }
  }
  std::ostringstream out;
  out << episodes << " episodes, 0 repeats filtered, " << repeats << " repeats in the ablation";
  detail = out.str();
  return repeats > 0;
}

// --- criterion 3: 260 actions ---

bool criterion_action_space(std::string& detail) {
  const auto actions = enumerate_actions(gridcraft::verbs(), gridcraft::nouns());
  std::ostringstream out;
  out << gridcraft::verbs().size() << " verbs x (" << gridcraft::nouns().size()
      << " nouns + 1) = " << actions.size();
  detail = out.str();
  return gridcraft::verbs().size() == 13 && gridcraft::nouns().size() == 19 &&
         actions.size() == 260;
}

// --- criterion 4: gradient check and chain-MDP convergence ---

bool criterion_dqn(std::string& detail) {
  // (a) analytic vs central finite differences on a tiny network.
  Rng init(5);
  nn::DuelingQNetwork net(2, 2, 2, init);
  nn::Matrix inputs(3, 2);
  inputs << 0.3, -0.7, 1.1, 0.4, -0.2, 0.9;
  const std::vector<int> actions = {0, 1, 0};
  nn::Vector targets(3);
  targets << 0.5, -0.25, 1.5;
  nn::DuelingQNetwork grad_net = net;
  grad_net.loss_and_grad(inputs, actions, targets);
  const std::vector<double> analytic = grad_net.flatten_gradients();
  const std::vector<double> params = net.flatten();
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double> plus = params, minus = params;
    plus[i] += h;
    minus[i] -= h;
    nn::DuelingQNetwork np = net, nm = net;
    np.unflatten(plus);
    nm.unflatten(minus);
    const double numeric =
        (np.loss(inputs, actions, targets) - nm.loss(inputs, actions, targets)) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    max_rel = std::max(max_rel, std::abs(analytic[i] - numeric) / denom);
  }
  if (max_rel >= 1e-3) {
    detail = "gradient check relative error " + std::to_string(max_rel);
    return false;
  }

  // (b) 5-state chain MDP against a value-iteration oracle.
  const int kStates = 5;
  const double gamma = 0.9;
  // Dynamics: action 0 steps left (floor 0), action 1 steps right; reaching
  // state 4 pays 1 and terminates.
  auto next_state = [](int s, int a) { return a == 1 ? s + 1 : std::max(0, s - 1); };
  std::vector<std::array<double, 2>> q_star(kStates, {0.0, 0.0});
  for (int sweep = 0; sweep < 500; ++sweep) {
    for (int s = 0; s < 4; ++s) {  // state 4 is terminal
      for (int a = 0; a < 2; ++a) {
        const int sn = next_state(s, a);
        const double reward = sn == 4 ? 1.0 : 0.0;
        const double bootstrap = sn == 4 ? 0.0 : std::max(q_star[sn][0], q_star[sn][1]);
        q_star[s][a] = reward + gamma * bootstrap;
      }
    }
  }

  AgentConfig config;
  config.gamma = gamma;
  config.n_step = 1;
  config.batch_size = 32;
  config.lr = 1.5e-3;
  config.target_update_interval = 250;
  config.epsilon_min = 1.0;  // uniform behavior covers all state-action pairs
  config.update_every = 1;
  config.seed_frames = 500;
  config.frame_stack = 1;
  config.hidden_width = 24;
  config.replay_capacity = 20000;
  config.caption_conditioned = false;
  config.goal_conditioned = false;

  LexicalEmbedder embedder(4);
  DqnAgent agent(config, kStates, 2, embedder, 17);
  Rng act_rng(17, "act");

  auto one_hot = [&](int s) {
    std::vector<float> obs(kStates, 0.0f);
    obs[static_cast<std::size_t>(s)] = 1.0f;
    return obs;
  };

  const auto start = std::chrono::steady_clock::now();
  int state = 0;
  for (std::int64_t t = 0; t < 51000 && agent.updates() < 50000; ++t) {
    agent.begin_step(one_hot(state), 0, 0, agent.store());
    const int action = agent.act(1.0, act_rng);
    const int sn = next_state(state, action);
    const double reward = sn == 4 ? 1.0 : 0.0;
    const bool done = sn == 4;
    agent.end_step(action, reward, done);
    state = done ? 0 : sn;
    if (t >= config.seed_frames && agent.can_update()) agent.update();
  }

  double max_error = 0.0;
  for (int s = 0; s < 4; ++s) {
    Eigen::VectorXd input(kStates);
    input.setZero();
    input(s) = 1.0;
    const nn::Vector q = agent.online().q_values_single(input);
    for (int a = 0; a < 2; ++a) {
      max_error = std::max(max_error, std::abs(q(a) - q_star[static_cast<std::size_t>(s)][a]));
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  out << "gradcheck rel err " << max_rel << "; chain max|Q-Q*| = " << max_error << " after "
      << agent.updates() << " updates in " << seconds << " s";
  detail = out.str();
  return max_error < 1e-2 && agent.updates() <= 50000 && seconds < 120.0;
}

// --- criteria 5 and 6: desk-scale training ordering ---

AgentConfig desk_agent() {
  AgentConfig config;  // Appendix-table values except the desk-scale net width
  config.hidden_width = 64;
  config.replay_capacity = 100000;
  return config;
}

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return values.empty() ? 0.0 : total / static_cast<double>(values.size());
}

double pretrain_mean_metric(RunConfig config, std::string& log_line) {
  std::vector<double> means;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed : config.seeds) {
    const RunArtifacts artifacts = pretrain(config, seed);
    means.push_back(artifacts.final_eval.mean);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  out << to_string(config.method);
  if (config.suggestor_match_accuracy < 1.0) out << "@" << config.suggestor_match_accuracy;
  out << " mean=" << mean_of(means) << " (seeds:";
  for (double m : means) out << " " << m;
  out << ") " << static_cast<int>(seconds) << "s";
  log_line = out.str();
  return mean_of(means);
}

bool criterion_exploration_ordering(std::string& detail) {
  RunConfig base;
  base.env_id = "gridcraft";
  base.steps = 200000;
  base.seeds = {1, 2, 3};
  base.agent = desk_agent();
  base.eval_episodes = 10;
  base.eval_trials = 10;

  std::string log;
  std::ostringstream all;

  RunConfig oracle = base;
  oracle.method = Method::oracle;
  const double oracle_mean = pretrain_mean_metric(oracle, log);
  all << log << "; ";

  RunConfig ellm_run = base;
  ellm_run.method = Method::ellm;
  const double ellm_mean = pretrain_mean_metric(ellm_run, log);
  all << log << "; ";

  RunConfig uniform = base;
  uniform.method = Method::uniform;
  const double uniform_mean = pretrain_mean_metric(uniform, log);
  all << log;

  detail = all.str();
  return oracle_mean >= ellm_mean && ellm_mean >= 1.5 * uniform_mean;
}

bool criterion_housegrid_directional(std::string& detail) {
  RunConfig base;
  base.env_id = "housegrid";
  base.tasks_file = kDataDir + "/housekeep_tasks.json";
  base.housegrid_task_id = 1;
  base.steps = 200000;
  base.seeds = {1, 2, 3};
  base.agent = desk_agent();
  base.agent.epsilon_min = 0.1;  // Appendix housegrid value
  base.agent.lr = 1e-4;
  base.eval_episodes = 10;
  base.eval_trials = 10;

  std::string log;
  std::ostringstream all;

  RunConfig aligned = base;
  aligned.method = Method::ellm;
  const double aligned_mean = pretrain_mean_metric(aligned, log);
  all << log << "; ";

  RunConfig novelty = base;
  novelty.method = Method::novelty;
  const double novelty_mean = pretrain_mean_metric(novelty, log);
  all << log << "; ";

  RunConfig degraded = base;
  degraded.method = Method::ellm;
  degraded.suggestor_match_accuracy = 0.5;
  const double degraded_mean = pretrain_mean_metric(degraded, log);
  all << log;

  detail = all.str();
  return aligned_mean > novelty_mean && degraded_mean < aligned_mean;
}

// --- criterion 7: prompt golden files ---

bool criterion_prompt_fidelity(std::string& detail) {
  const std::string caption =
      "You see water, grass, cow, and diamond. You are targeting grass. "
      "You have in your inventory plant.";
  const std::string crafter = build_prompt_crafter(caption, PromptTemplate::crafter_default());
  const std::string crafter_golden = read_file(kDataDir + "/golden/crafter_prompt.txt");
  if (crafter != crafter_golden || crafter_golden.empty()) {
    detail = "crafter prompt deviates from the golden file";
    return false;
  }
  const std::string house = build_prompt_housegrid("vase", "shelf");
  const std::string house_golden = read_file(kDataDir + "/golden/housegrid_prompt.txt");
  if (house != house_golden || house_golden.empty()) {
    detail = "housegrid prompt deviates from the golden file";
    return false;
  }
  detail = "both prompts byte-identical to the golden files";
  return true;
}

// --- criterion 8: suggestion analysis fixture ---

bool criterion_analysis_fixture(std::string& detail) {
  Observation tree_context;
  tree_context.view_rows = 1;
  tree_context.view_cols = 1;
  tree_context.local_view.push_back(Cell{"tree", {}});
  Observation empty_context;
  empty_context.view_rows = 1;
  empty_context.view_cols = 1;
  empty_context.local_view.push_back(Cell{"sand", {}});
  Observation stone_context;
  stone_context.view_rows = 1;
  stone_context.view_cols = 1;
  stone_context.local_view.push_back(Cell{"stone", {}});

  // The published percentages sum to 99.9 due to rounding; the fixture
  // counts are chosen so the one-decimal percentages land on the published
  // values exactly: 2597/545/657/201 of 4000.
  std::vector<SuggestionEvent> suggested;
  auto add = [&](int count, const std::string& goal, const Observation& context) {
    for (int i = 0; i < count; ++i) {
      SuggestionEvent event;
      event.goals = {goal};
      event.context = context;
      suggested.push_back(event);
    }
  };
  add(2597, "chop tree", tree_context);
  add(545, "chop tree", empty_context);
  add(657, "mine grass", tree_context);
  add(201, "make path", tree_context);

  std::vector<RewardEvent> rewarded;
  auto add_reward = [&](int count, const std::string& goal, const Observation& context) {
    for (int i = 0; i < count; ++i) {
      RewardEvent event;
      event.matched_goal = goal;
      event.reward = 1.0;
      event.context = context;
      rewarded.push_back(event);
    }
  };
  add_reward(665, "chop tree", tree_context);
  add_reward(11, "mine stone", stone_context);  // context-insensitive: no pickaxe
  add_reward(324, "mine grass", tree_context);

  const SuggestionAnalysis analysis = analyze_suggestions(suggested, rewarded);
  auto pct = [](double fraction) { return std::round(fraction * 1000.0) / 10.0; };
  const bool exact = pct(analysis.suggested_fractions[0]) == 64.9 &&
                     pct(analysis.suggested_fractions[1]) == 13.6 &&
                     pct(analysis.suggested_fractions[2]) == 16.4 &&
                     pct(analysis.suggested_fractions[3]) == 5.0 &&
                     analysis.rewarded_fractions[3] == 0.0;
  std::ostringstream out;
  out << "suggested " << pct(analysis.suggested_fractions[0]) << "/"
      << pct(analysis.suggested_fractions[1]) << "/" << pct(analysis.suggested_fractions[2])
      << "/" << pct(analysis.suggested_fractions[3]) << " %, rewarded impossible "
      << analysis.rewarded_fractions[3] * 100 << "%";
  detail = out.str();
  return exact;
}

// --- criterion 9: completion cache contract ---

bool criterion_cache_contract(std::string& detail) {
  const std::string cache_file = kOutDir + "/acceptance_cache.jsonl";
  std::remove(cache_file.c_str());

  RunConfig config = audit_config(Method::ellm);
  config.suggestor = "llm_open_ended";
  config.steps = 400;

  auto make_transport = [] {
    auto transport = std::make_unique<ellm_test::FakeTransport>();
    transport->handler = [](const std::string&, const std::string&) {
      return ellm_test::completion_ok("- Chop tree\\n- Drink water\\n- Eat cow");
    };
    return transport;
  };
  LlmClientConfig client_config;
  client_config.endpoint = "http://fake";
  client_config.cache_file = cache_file;

  std::int64_t cold_calls = 0;
  {
    LlmClient cold(client_config, make_transport());
    cold_calls = pretrain(config, 33, &cold).llm_network_calls;
    if (cold_calls <= 0) {
      detail = "cold run made no completion requests";
      return false;
    }
    // Identical requests collapse onto one cache entry.
    const CompletionRequest repeated{.model = "m", .prompt = "same prompt"};
    cold.complete(repeated);
    const std::size_t before = cold.cache_size();
    cold.complete(repeated);
    if (cold.cache_size() != before) {
      detail = "identical requests created extra cache entries";
      return false;
    }
  }
  const CacheStats stats = LlmClient::cache_stats(cache_file);
  if (stats.duplicate_keys != 0) {
    detail = "cache file contains duplicate keys";
    return false;
  }

  std::int64_t warm_calls = -1;
  {
    LlmClient warm(client_config, make_transport());
    warm_calls = pretrain(config, 33, &warm).llm_network_calls;
  }
  if (warm_calls != 0) {
    detail = "warm-cache run still performed " + std::to_string(warm_calls) + " network calls";
    return false;
  }

  // Replay-mode misses abort.
  LlmClientConfig replay_config;
  replay_config.cache_file = cache_file;
  replay_config.replay_only = true;
  LlmClient replay(replay_config);
  bool aborted = false;
  try {
    replay.complete(CompletionRequest{.model = "m", .prompt = "never seen"});
  } catch (const CacheMissError&) {
    aborted = true;
  }
  std::ostringstream out;
  out << "cold calls " << cold_calls << ", warm calls 0, " << stats.entries
      << " entries, replay miss aborted";
  detail = out.str();
  return aborted;
}

// --- criterion 10: baseline reward properties ---

bool criterion_baseline_rewards(std::string& detail) {
  // RND convergence on a repeated state, with an annealed predictor step so
  // the adaptive-moment limit cycle dies out.
  Rng rng(3);
  RndConfig rnd_config;
  RndState rnd_state = RndState::init(8, rnd_config, rng);
  Eigen::VectorXd repeated(8);
  repeated << 0.2, -0.4, 0.8, 0.1, -0.9, 0.5, 0.3, -0.2;
  double rnd_value = 1.0;
  for (int i = 0; i < 15000; ++i) {
    rnd_state.config.adam.lr = 2e-3 / (1.0 + i / 1500.0);
    rnd_value = rnd_reward(rnd_state, repeated);
  }
  if (rnd_value > 1e-3) {
    detail = "rnd reward on the repeated state is " + std::to_string(rnd_value);
    return false;
  }

  // APT against the quadratic oracle on 1000 random embeddings.
  Rng apt_rng(21);
  const int dimension = 16;
  AptBuffer buffer(dimension, 1000);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd p(dimension);
    for (int d = 0; d < dimension; ++d) p(d) = apt_rng.next_gaussian();
    points.push_back(p);
    buffer.push(p);
  }
  for (int probe = 0; probe < 20; ++probe) {
    Eigen::VectorXd query(dimension);
    for (int d = 0; d < dimension; ++d) query(d) = apt_rng.next_gaussian();
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < points.size(); ++i) {
      all.emplace_back((points[i] - query).norm(), i);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected;
    for (int i = 0; i < 12; ++i) expected.push_back(all[static_cast<std::size_t>(i)].second);
    if (apt_nearest(query, buffer, 12) != expected) {
      detail = "apt nearest neighbors deviate from the quadratic oracle";
      return false;
    }
  }

  // NovelD episodic gate.
  if (noveld_reward(0.4, 2.0, false, 0.5) != 0.0 ||
      noveld_reward(1.0, 1.0, true, 0.5) != 0.5) {
    detail = "noveld gate arithmetic is wrong";
    return false;
  }
  std::ostringstream out;
  out << "rnd converged to " << rnd_value << "; apt matches oracle; noveld gate holds";
  detail = out.str();
  return true;
}

// --- criterion 11: noise injector calibration ---

bool criterion_noise_calibration(std::string& detail) {
  CaptionConfusion confusion;
  confusion.rows["chop tree"]["chop tree"] = 0.9;
  confusion.rows["chop tree"]["chop grass"] = 0.8;
  Rng rng(5);
  int tree = 0, grass = 0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    for (const auto& caption : inject_noise("chop tree", confusion, rng)) {
      if (caption == "chop tree") ++tree;
      if (caption == "chop grass") ++grass;
    }
  }
  const double tree_rate = static_cast<double>(tree) / samples;
  const double grass_rate = static_cast<double>(grass) / samples;
  if (std::abs(tree_rate - 0.9) >= 0.02 || std::abs(grass_rate - 0.8) >= 0.02) {
    std::ostringstream out;
    out << "empirical rates " << tree_rate << "/" << grass_rate << " off configuration";
    detail = out.str();
    return false;
  }

  // Identity matrix: reward sequence identical to the noiseless path.
  std::vector<std::string> captions;
  for (const auto& action : enumerate_actions(gridcraft::verbs(), gridcraft::nouns())) {
    captions.push_back(action.text());
  }
  const std::string identity_path = kOutDir + "/acceptance_identity_confusion.json";
  {
    std::ofstream out(identity_path);
    out << CaptionConfusion::identity(captions).to_json();
  }
  RunConfig base = audit_config(Method::ellm);
  base.steps = 3000;
  const RunArtifacts clean = pretrain(base, 41);
  RunConfig noisy = base;
  noisy.noise_config_file = identity_path;
  const RunArtifacts with_identity = pretrain(noisy, 41);
  if (clean.rewards.size() != with_identity.rewards.size()) {
    detail = "identity confusion changed the number of rewards";
    return false;
  }
  for (std::size_t i = 0; i < clean.rewards.size(); ++i) {
    if (clean.rewards[i].reward != with_identity.rewards[i].reward ||
        clean.rewards[i].t != with_identity.rewards[i].t) {
      detail = "identity confusion changed reward " + std::to_string(i);
      return false;
    }
  }
  std::ostringstream out;
  out << "rates " << tree_rate << "/" << grass_rate << " within 0.02; identity path identical ("
      << clean.rewards.size() << " rewards)";
  detail = out.str();
  return true;
}

struct Criterion {
  int id;
  const char* title;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "reward semantics match the brute-force oracle exactly", criterion_reward_semantics},
      {2, "novelty filter yields no repeated episode-goal rewards", criterion_novelty_filter},
      {3, "gridcraft enumerates exactly 260 actions", criterion_action_space},
      {4, "DQN gradient check and chain-MDP convergence", criterion_dqn},
      {5, "exploration ordering oracle >= ellm >= 1.5x uniform", criterion_exploration_ordering},
      {6, "housegrid: aligned ellm beats novelty; degraded accuracy hurts",
       criterion_housegrid_directional},
      {7, "prompts match the golden files byte-exactly", criterion_prompt_fidelity},
      {8, "analysis fixture reproduces the published fractions", criterion_analysis_fixture},
      {9, "completion cache contract", criterion_cache_contract},
      {10, "baseline reward properties (rnd, apt, noveld)", criterion_baseline_rewards},
      {11, "noise injector calibration and identity equivalence", criterion_noise_calibration},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criteria") == 0 && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string token;
      while (std::getline(list, token, ',')) selected.insert(std::atoi(token.c_str()));
    }
  }

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.id)) continue;
    std::string criterion_detail;
    bool ok = false;
    try {
      ok = criterion.run(criterion_detail);
    } catch (const std::exception& ex) {
      criterion_detail = std::string("exception: ") + ex.what();
    }
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.title,
                criterion_detail.empty() ? "" : " -- ", criterion_detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
