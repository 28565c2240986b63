#include <benchmark/benchmark.h>

#include "ellm/agent.hpp"
#include "ellm/embedding.hpp"
#include "ellm/features.hpp"
#include "ellm/gridcraft.hpp"
#include "ellm/reward.hpp"

namespace {

void BM_EmbedAndCosine(benchmark::State& state) {
  ellm::LexicalEmbedder embedder(128);
  const ellm::EmbeddingVector goal = embedder.embed("place crafting table");
  for (auto _ : state) {
    const ellm::EmbeddingVector caption = embedder.embed("chop tree");
    benchmark::DoNotOptimize(ellm::cosine(caption, goal));
  }
}
BENCHMARK(BM_EmbedAndCosine);

void BM_GridcraftStep(benchmark::State& state) {
  ellm::gridcraft::GridcraftEnv env(ellm::gridcraft::GridcraftConfig::desk());
  env.reset(3);
  ellm::Rng rng(5);
  const auto& actions = env.actions();
  for (auto _ : state) {
    const auto result = env.step(actions[rng.next_below(actions.size())]);
    benchmark::DoNotOptimize(result.observation.local_view.size());
    if (result.done) env.reset(3);
  }
}
BENCHMARK(BM_GridcraftStep);

void BM_GridcraftFeatures(benchmark::State& state) {
  ellm::gridcraft::GridcraftEnv env(ellm::gridcraft::GridcraftConfig::desk());
  const ellm::Observation obs = env.reset(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellm::gridcraft_features(obs));
  }
}
BENCHMARK(BM_GridcraftFeatures);

void BM_AgentUpdate(benchmark::State& state) {
  ellm::AgentConfig config;
  config.hidden_width = static_cast<int>(state.range(0));
  config.batch_size = 64;
  config.frame_stack = 4;
  config.seed_frames = 0;
  config.caption_conditioned = true;
  config.goal_conditioned = true;
  ellm::LexicalEmbedder embedder(128);
  ellm::DqnAgent agent(config, ellm::gridcraft_feature_dim(), 260, embedder, 1);

  ellm::Rng rng(2);
  std::vector<float> obs(static_cast<std::size_t>(ellm::gridcraft_feature_dim()));
  for (int t = 0; t < 600; ++t) {
    for (auto& value : obs) value = static_cast<float>(rng.next_unit());
    agent.begin_step(obs, 0, 0, agent.store());
    agent.end_step(static_cast<int>(rng.next_below(260)), rng.next_unit(), t % 97 == 96);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.update());
  }
}
BENCHMARK(BM_AgentUpdate)->Arg(64)->Arg(512);

void BM_AptReward(benchmark::State& state) {
  ellm::Rng rng(7);
  ellm::AptBuffer buffer(84, 256);
  Eigen::VectorXd point(84);
  for (int i = 0; i < 256; ++i) {
    for (int d = 0; d < 84; ++d) point(d) = rng.next_gaussian();
    buffer.push(point);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellm::apt_reward(point, buffer, 12));
  }
}
BENCHMARK(BM_AptReward);

}  // namespace

BENCHMARK_MAIN();
