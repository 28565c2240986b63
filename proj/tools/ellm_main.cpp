#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellm/analyze.hpp"
#include "ellm/harness.hpp"
#include "ellm/llm_client.hpp"
#include "ellm/reports.hpp"
#include "ellm/suggestion.hpp"

namespace {

#ifndef ELLM_DATA_DIR
#define ELLM_DATA_DIR "data"
#endif

struct LlmFlags {
  std::string cache_file;
  bool replay_only = false;
};

std::unique_ptr<ellm::LlmClient> make_client_if_needed(const ellm::RunConfig& config,
                                                       const LlmFlags& flags) {
  const bool llm_suggestor = config.suggestor.rfind("llm_", 0) == 0 &&
                             ellm::method_uses_similarity(config.method);
  if (!llm_suggestor) return nullptr;
  ellm::LlmClientConfig client_config = ellm::LlmClientConfig::from_env();
  client_config.cache_file = flags.cache_file;
  client_config.replay_only = flags.replay_only;
  return std::make_unique<ellm::LlmClient>(std::move(client_config));
}

void add_run_flags(CLI::App* cmd, ellm::RunConfig& config, std::string& config_file,
                   std::string& method_name, LlmFlags& llm) {
  cmd->add_option("--config", config_file, "run config JSON file (flags override it)");
  cmd->add_option("--env", config.env_id, "gridcraft | housegrid");
  cmd->add_option("--method", method_name,
                  "ellm | oracle | novelty | uniform | apt | rnd | noveld | ellm_no_novelty");
  cmd->add_option("--suggestor", config.suggestor,
                  "scripted_oracle | llm_open_ended | llm_closed_form");
  cmd->add_option("--embedder", config.embedder, "lexical | random_projection");
  cmd->add_option("--threshold", config.threshold, "similarity threshold T");
  cmd->add_option("--k", config.k, "max suggested goals per query");
  cmd->add_option("--seeds", config.seeds, "run seeds")->delimiter(',');
  cmd->add_option("--steps", config.steps, "environment step budget");
  cmd->add_option("--tasks-file", config.tasks_file, "housegrid task definition file");
  cmd->add_option("--task-id", config.housegrid_task_id, "housegrid task id (1-4)");
  cmd->add_option("--match-accuracy", config.suggestor_match_accuracy,
                  "scripted suggestor accuracy on true pairs");
  cmd->add_option("--mismatch-accuracy", config.suggestor_mismatch_accuracy,
                  "scripted suggestor accuracy on false pairs");
  cmd->add_option("--noise-config", config.noise_config_file,
                  "caption confusion matrix enabling the noisy reward path");
  cmd->add_option("--gridcraft-config", config.gridcraft_config_file,
                  "gridcraft environment config file");
  cmd->add_flag("--full-scale-env,!--desk-env", config.desk_env,
                "use the 64x64 map instead of the desk-scale 24x24")
      ->default_val(true);
  cmd->add_option("--model", config.llm_model, "completion model name");
  cmd->add_option("--out", config.out_dir, "artifact output directory");
  cmd->add_flag("--log-zero-rewards", config.log_zero_rewards,
                "log a reward record for every step");
  cmd->add_option("--eval-episodes", config.eval_episodes);
  cmd->add_option("--eval-trials", config.eval_trials);

  // Appendix-table hyperparameters.
  cmd->add_option("--gamma", config.agent.gamma);
  cmd->add_option("--n-step", config.agent.n_step);
  cmd->add_option("--batch-size", config.agent.batch_size);
  cmd->add_option("--lr", config.agent.lr);
  cmd->add_option("--target-interval", config.agent.target_update_interval);
  cmd->add_option("--epsilon-min", config.agent.epsilon_min);
  cmd->add_option("--update-every", config.agent.update_every);
  cmd->add_option("--seed-frames", config.agent.seed_frames);
  cmd->add_option("--frame-stack", config.agent.frame_stack);
  cmd->add_option("--hidden-width", config.agent.hidden_width);
  cmd->add_option("--replay-capacity", config.agent.replay_capacity);
  cmd->add_flag("--goal-conditioned,!--goal-free", config.agent.goal_conditioned)
      ->default_val(true);
  cmd->add_flag("--caption-conditioned,!--vision-only", config.agent.caption_conditioned)
      ->default_val(true);

  cmd->add_option("--llm-cache", llm.cache_file, "completion cache file");
  cmd->add_flag("--replay-only", llm.replay_only, "fail on completion cache misses");
}

void print_metric(const char* label, const ellm::MetricSummary& m) {
  std::printf("%s: mean=%.4f median=%.4f iqm=%.4f (%zu trials)\n", label, m.mean, m.median, m.iqm,
              m.trial_means.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale LLM-guided exploration runs: pretraining, transfer, analysis"};
  app.require_subcommand(1);

  // --- pretrain ---
  ellm::RunConfig pre_config;
  std::string pre_config_file, pre_method = "ellm";
  LlmFlags pre_llm;
  CLI::App* pre = app.add_subcommand("pretrain", "reward-free pretraining (Algorithm 1 loop)");
  add_run_flags(pre, pre_config, pre_config_file, pre_method, pre_llm);

  // --- transfer ---
  ellm::RunConfig tr_config;
  std::string tr_config_file, tr_method = "ellm", tr_checkpoint, tr_mode = "guided";
  LlmFlags tr_llm;
  std::uint64_t tr_seed = 1;
  CLI::App* tr = app.add_subcommand("transfer", "downstream-task training from a checkpoint");
  add_run_flags(tr, tr_config, tr_config_file, tr_method, tr_llm);
  tr->add_option("--checkpoint", tr_checkpoint, "pretrained checkpoint")->required();
  tr->add_option("--task", tr_config.task, "downstream task id")->required();
  tr->add_option("--mode", tr_mode, "finetune | guided");
  tr->add_option("--seed", tr_seed, "transfer run seed");
  tr->add_option("--finetune-lr", tr_config.finetune_lr);

  // --- eval ---
  std::string ev_checkpoint, ev_config_file;
  int ev_episodes = 10, ev_trials = 10;
  std::uint64_t ev_seed = 1;
  CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  ev->add_option("--checkpoint", ev_checkpoint)->required();
  ev->add_option("--config", ev_config_file,
                 "run config JSON (defaults to config.json beside the checkpoint)");
  ev->add_option("--episodes", ev_episodes);
  ev->add_option("--trials", ev_trials);
  ev->add_option("--seed", ev_seed);

  // --- analyze ---
  std::string an_run_dir, an_suggestions, an_events;
  CLI::App* an = app.add_subcommand("analyze", "suggestion-quality category fractions");
  an->add_option("--run-dir", an_run_dir, "run directory with suggestions.jsonl/events.jsonl");
  an->add_option("--suggestions", an_suggestions);
  an->add_option("--events", an_events);

  // --- cache ---
  CLI::App* cache = app.add_subcommand("cache", "completion cache maintenance");
  std::string cache_file, cache_out;
  std::vector<std::string> cache_inputs;
  CLI::App* cache_stats = cache->add_subcommand("stats", "entry and duplicate counts");
  cache_stats->add_option("--file", cache_file)->required();
  CLI::App* cache_merge = cache->add_subcommand("merge", "merge caches, deduplicating by key");
  cache_merge->add_option("--out", cache_out)->required();
  cache_merge->add_option("inputs", cache_inputs)->required();

  // --- plot ---
  std::string plot_out = "chart.svg", plot_title = "pretraining", plot_metric = "achievements";
  std::vector<std::string> plot_csvs;
  CLI::App* plot = app.add_subcommand("plot", "mean +/- std chart from episode CSVs");
  plot->add_option("--out", plot_out);
  plot->add_option("--title", plot_title);
  plot->add_option("--metric", plot_metric, "achievements | intrinsic | extrinsic");
  plot->add_option("csvs", plot_csvs, "episodes.csv files, one series each")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) {
      if (!pre_config_file.empty()) {
        ellm::RunConfig loaded = ellm::RunConfig::from_json_file(pre_config_file);
        std::string saved_out = pre_config.out_dir;
        pre_config = loaded;
        if (!saved_out.empty()) pre_config.out_dir = saved_out;
      }
      pre_config.method = ellm::method_from_string(pre_method);
      if (pre_config.env_id == "housegrid" && pre_config.tasks_file.empty()) {
        pre_config.tasks_file = std::string(ELLM_DATA_DIR) + "/housekeep_tasks.json";
      }
      auto client = make_client_if_needed(pre_config, pre_llm);
      const auto runs = ellm::pretrain_all(pre_config, client.get());
      for (const auto& run : runs) {
        std::printf("seed %llu: %zu episodes, eval ",
                    static_cast<unsigned long long>(run.seed), run.episodes.size());
        print_metric(pre_config.env_id == "housegrid" ? "success_rate" : "unique_achievements",
                     run.final_eval);
        if (!run.checkpoint_path.empty()) {
          std::printf("  checkpoint: %s\n", run.checkpoint_path.c_str());
        }
      }
      return 0;
    }
    if (*tr) {
      if (!tr_config_file.empty()) {
        std::string task = tr_config.task;
        tr_config = ellm::RunConfig::from_json_file(tr_config_file);
        tr_config.task = task;
      }
      tr_config.method = ellm::method_from_string(tr_method);
      tr_config.transfer_mode = tr_mode;
      if (tr_config.env_id == "housegrid" && tr_config.tasks_file.empty()) {
        tr_config.tasks_file = std::string(ELLM_DATA_DIR) + "/housekeep_tasks.json";
      }
      auto client = make_client_if_needed(tr_config, tr_llm);
      const auto run = ellm::transfer(tr_config, tr_checkpoint, tr_seed, client.get());
      std::printf("transfer %s (%s): %zu episodes\n", tr_config.task.c_str(), tr_mode.c_str(),
                  run.episodes.size());
      print_metric("task_success", run.final_eval);
      if (tr_mode == "guided") {
        std::printf("guide parameter hash: %016llx -> %016llx (%s)\n",
                    static_cast<unsigned long long>(run.guide_hash_before),
                    static_cast<unsigned long long>(run.guide_hash_after),
                    run.guide_hash_before == run.guide_hash_after ? "frozen" : "CHANGED");
      }
      return 0;
    }
    if (*ev) {
      std::string config_path = ev_config_file;
      if (config_path.empty()) {
        const auto slash = ev_checkpoint.find_last_of('/');
        config_path =
            (slash == std::string::npos ? "." : ev_checkpoint.substr(0, slash)) + "/config.json";
      }
      ellm::RunConfig config = ellm::RunConfig::from_json_file(config_path);
      config.eval_episodes = ev_episodes;
      config.eval_trials = ev_trials;
      ellm::LexicalEmbedder lexical(config.embed_dim);
      ellm::RandomProjectionEmbedder projection(config.embed_dim, 1);
      const ellm::Embedder& embedder =
          config.embedder == "random_projection"
              ? static_cast<const ellm::Embedder&>(projection)
              : static_cast<const ellm::Embedder&>(lexical);
      ellm::DqnAgent agent = ellm::DqnAgent::load_checkpoint(ev_checkpoint, embedder);
      const ellm::MetricSummary metrics = ellm::evaluate(config, agent, ev_seed);
      print_metric(config.env_id == "housegrid" ? "success_rate" : "unique_achievements", metrics);
      return 0;
    }
    if (*an) {
      std::string suggestions = an_suggestions, events = an_events;
      if (!an_run_dir.empty()) {
        suggestions = an_run_dir + "/suggestions.jsonl";
        events = an_run_dir + "/events.jsonl";
      }
      if (suggestions.empty() || events.empty()) {
        std::fprintf(stderr, "analyze needs --run-dir or both --suggestions and --events\n");
        return 1;
      }
      const auto analysis = ellm::analyze_suggestion_files(suggestions, events);
      std::fputs(ellm::analysis_to_table(analysis).c_str(), stdout);
      return 0;
    }
    if (*cache) {
      if (*cache_stats) {
        const auto stats = ellm::LlmClient::cache_stats(cache_file);
        std::printf("entries: %zu\nduplicate keys: %zu\nbytes: %zu\n", stats.entries,
                    stats.duplicate_keys, stats.bytes);
      } else if (*cache_merge) {
        const std::size_t written = ellm::LlmClient::merge_cache_files(cache_inputs, cache_out);
        std::printf("merged %zu unique entries into %s\n", written, cache_out.c_str());
      } else {
        std::fprintf(stderr, "cache needs a stats or merge subcommand\n");
        return 1;
      }
      return 0;
    }
    if (*plot) {
      std::vector<ellm::ChartSeries> series;
      for (const auto& csv : plot_csvs) {
        std::ifstream in(csv);
        if (!in) {
          std::fprintf(stderr, "cannot open %s\n", csv.c_str());
          return 1;
        }
        std::string line;
        std::getline(in, line);  // header
        std::map<long, std::vector<double>> by_episode;
        while (std::getline(in, line)) {
          long step = 0, episode = 0;
          double achievements = 0, intrinsic = 0, extrinsic = 0;
          if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf,%lf", &step, &episode, &achievements,
                          &intrinsic, &extrinsic) == 5) {
            double value = achievements;
            if (plot_metric == "intrinsic") value = intrinsic;
            if (plot_metric == "extrinsic") value = extrinsic;
            by_episode[episode].push_back(value);
          }
        }
        ellm::ChartSeries s;
        s.label = csv;
        for (const auto& [episode, values] : by_episode) {
          double mean = 0;
          for (double v : values) mean += v;
          mean /= static_cast<double>(values.size());
          double var = 0;
          for (double v : values) var += (v - mean) * (v - mean);
          s.x.push_back(static_cast<double>(episode));
          s.mean.push_back(mean);
          s.std_dev.push_back(std::sqrt(var / static_cast<double>(values.size())));
        }
        series.push_back(std::move(s));
      }
      ellm::write_svg_chart(plot_out, plot_title, "episode", plot_metric, series);
      std::printf("wrote %s\n", plot_out.c_str());
      return 0;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
