#include <doctest.h>

#include <algorithm>
#include <set>

#include "ellm/errors.hpp"
#include "ellm/features.hpp"
#include "ellm/housegrid.hpp"
#include "ellm/rng.hpp"

using namespace ellm;
using namespace ellm::housegrid;

namespace {

const std::string kTasksFile = std::string(ELLM_DATA_DIR) + "/housekeep_tasks.json";

// Random rollout helper returning every observation.
StepResult random_step(HousegridEnv& env, Rng& rng) {
  return env.step(env.actions()[rng.next_below(env.actions().size())]);
}

}  // namespace

TEST_CASE("load_task matches the shipped fixture rows") {
  const RearrangementTask task1 = load_task(kTasksFile, 1);
  std::vector<std::string> names;
  for (const auto& object : task1.objects) names.push_back(object.name);
  CHECK(names == std::vector<std::string>{"peppermint", "lamp", "lantern", "herring fillets",
                                          "vase"});

  const RearrangementTask task4 = load_task(kTasksFile, 4);
  std::set<std::string> task4_names;
  for (const auto& object : task4.objects) task4_names.insert(object.name);
  CHECK(task4_names.count("pan") == 1);
  CHECK(task4_names.count("knife") == 1);

  CHECK_THROWS_AS(load_task(kTasksFile, 5), ConfigError);
}

TEST_CASE("all shipped tasks have five misplaced objects") {
  for (const auto& task : load_all_tasks(kTasksFile)) {
    CHECK(task.objects.size() == 5);
    for (const auto& object : task.objects) {
      CHECK(std::find(object.correct.begin(), object.correct.end(), object.start) ==
            object.correct.end());
    }
  }
}

TEST_CASE("success_rate counts ground-truth placements") {
  const RearrangementTask task = load_task(kTasksFile, 1);

  // All objects at their start receptacles: everything misplaced.
  std::map<std::string, std::string> placements;
  for (const auto& object : task.objects) placements[object.name] = object.start;
  CHECK(success_rate(task, placements) == 0.0);

  // All correct.
  for (const auto& object : task.objects) placements[object.name] = object.correct.front();
  CHECK(success_rate(task, placements) == 1.0);

  // Two of five correct.
  placements = {};
  placements["peppermint"] = "kitchen cabinet";
  placements["lamp"] = "shelf";
  placements["lantern"] = "drawer";
  placements["herring fillets"] = "drawer";
  placements["vase"] = "kitchen sink";
  CHECK(success_rate(task, placements) == doctest::Approx(0.4));
}

TEST_CASE("success_rate is order-invariant and monotone") {
  const RearrangementTask task = load_task(kTasksFile, 2);
  std::map<std::string, std::string> placements;
  double previous = 0.0;
  for (const auto& object : task.objects) {
    placements[object.name] = object.correct.front();
    const double now = success_rate(task, placements);
    CHECK(now >= previous);
    previous = now;
  }
  CHECK(previous == 1.0);
}

TEST_CASE("housegrid env step semantics: pick and place") {
  HousegridEnv env(load_task(kTasksFile, 1));
  Observation obs = env.reset(0);
  CHECK(env.current_success_rate() == 0.0);

  // The initial placements mirror the task starts.
  const auto placements = env.placements();
  CHECK(placements.at("vase") == "kitchen sink");
  CHECK(placements.at("peppermint") == "drawer");

  // Pick with an empty gripper fails unless the object is in the faced cell.
  const StepResult missed = env.step(ActionSpec{"pick", "vase"});
  CHECK_FALSE(missed.action_outcome.has_value());
  CHECK_FALSE(missed.observation.holding.has_value());
}

TEST_CASE("a scripted walk picks the vase and places it correctly") {
  const RearrangementTask task = load_task(kTasksFile, 1);
  HousegridEnv env(task);
  Observation obs = env.reset(0);

  // Walk until facing the receptacle that holds the vase, using a random
  // exploration policy; then pick, then walk to a correct receptacle.
  Rng rng(4);
  bool picked = false;
  for (int t = 0; t < 4000 && !picked; ++t) {
    if (obs.target && *obs.target == "kitchen sink" && !obs.holding) {
      const StepResult step = env.step(ActionSpec{"pick", "vase"});
      if (step.action_outcome) {
        CHECK(step.action_outcome->text() == "pick vase");
        CHECK(step.observation.holding == std::optional<std::string>("vase"));
        picked = true;
        obs = step.observation;
        break;
      }
    }
    obs = random_step(env, rng).observation;
    if (!obs.holding && env.placements().count("vase") == 0) {
      // A random pick grabbed it first; drop tracking and re-check below.
      picked = true;
    }
  }
  REQUIRE(picked);

  // While holding, placing into a faced correct receptacle succeeds.
  if (obs.holding == std::optional<std::string>("vase")) {
    bool placed = false;
    for (int t = 0; t < 8000 && !placed; ++t) {
      if (obs.target && *obs.target == "shelf") {
        const StepResult step = env.step(ActionSpec{"place", "shelf"});
        if (step.action_outcome) {
          CHECK(step.action_outcome->text() == "place vase in/on shelf");
          CHECK(env.placements().at("vase") == "shelf");
          CHECK(env.current_success_rate() == doctest::Approx(0.2));
          placed = true;
          break;
        }
      }
      const ActionSpec move = rng.next_bool(0.5)
                                  ? ActionSpec{"forward", std::nullopt}
                                  : ActionSpec{rng.next_bool(0.5) ? "turn left" : "turn right",
                                               std::nullopt};
      obs = env.step(move).observation;
    }
    CHECK(placed);
  }
}

TEST_CASE("pick while holding is a no-op") {
  const RearrangementTask task = load_task(kTasksFile, 1);
  HousegridEnv env(task);
  Observation obs = env.reset(0);
  Rng rng(6);
  // Acquire any object first.
  while (!obs.holding) {
    obs = random_step(env, rng).observation;
  }
  const std::string held = *obs.holding;
  for (const auto& object : task.objects) {
    if (object.name == held) continue;
    const StepResult step = env.step(ActionSpec{"pick", object.name});
    CHECK_FALSE(step.action_outcome.has_value());
    CHECK(step.observation.holding == std::optional<std::string>(held));
  }
}

TEST_CASE("look up and look down are retained as no-ops") {
  HousegridEnv env(load_task(kTasksFile, 1));
  const Observation before = env.reset(0);
  const StepResult up = env.step(ActionSpec{"look up", std::nullopt});
  CHECK_FALSE(up.action_outcome.has_value());
  const StepResult down = env.step(ActionSpec{"look down", std::nullopt});
  CHECK(down.observation.local_view == before.local_view);
}

TEST_CASE("object conservation: every object is in exactly one place") {
  const RearrangementTask task = load_task(kTasksFile, 3);
  HousegridEnv env(task);
  env.reset(0);
  Rng rng(12);
  for (int t = 0; t < 3000; ++t) {
    const StepResult step = random_step(env, rng);
    const auto placements = env.placements();
    int held = step.observation.holding ? 1 : 0;
    CHECK(placements.size() + held == task.objects.size());
    if (step.done) env.reset(0);
  }
}

TEST_CASE("episode cap terminates and reset restores the scene") {
  HousegridConfig config;
  config.episode_cap = 25;
  HousegridEnv env(load_task(kTasksFile, 2), config);
  env.reset(0);
  int steps = 0;
  bool done = false;
  while (!done) {
    done = env.step(ActionSpec{"turn left", std::nullopt}).done;
    ++steps;
  }
  CHECK(steps == 25);
  env.reset(0);
  CHECK(env.ledger().step_count == 0);
  CHECK(env.current_success_rate() == 0.0);
}

TEST_CASE("expressible goals cover picks and all object-receptacle pairs") {
  const RearrangementTask task = load_task(kTasksFile, 1);
  const auto goals = HousegridEnv::expressible_goals(task);
  CHECK(goals.size() == task.objects.size() + task.objects.size() * task.receptacles.size());
  CHECK(std::find(goals.begin(), goals.end(), "pick vase") != goals.end());
  CHECK(std::find(goals.begin(), goals.end(), "place vase in/on shelf") != goals.end());
}

TEST_CASE("housegrid features have the documented dimension and flag holding") {
  const RearrangementTask task = load_task(kTasksFile, 1);
  HousegridEnv env(task);
  Observation obs = env.reset(0);
  auto features = housegrid_features(obs, task);
  CHECK(static_cast<int>(features.size()) == housegrid_feature_dim(task));
  CHECK(features.back() == 0.0f);  // not holding

  Rng rng(4);
  while (!obs.holding) obs = random_step(env, rng).observation;
  features = housegrid_features(obs, task);
  CHECK(features.back() == 1.0f);
}
