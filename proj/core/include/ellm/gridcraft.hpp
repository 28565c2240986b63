#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ellm/env.hpp"
#include "ellm/rng.hpp"

namespace ellm::gridcraft {

// --- vocabulary ---

// 13 verbs and 19 nouns; the combinatorial action space has 13 * 20 = 260
// entries including nonsense pairings like "drink tree".
const std::vector<std::string>& verbs();
const std::vector<std::string>& nouns();

// Canonical display/feature order for everything that can occupy a cell.
const std::vector<std::string>& cell_kinds();
// Canonical inventory item order.
const std::vector<std::string>& item_kinds();

// The 22 unlockable achievements and their prerequisite DAG.
const std::vector<std::string>& achievements();
const std::map<std::string, std::vector<std::string>>& achievement_prerequisites();

// Canonical goal string for an achievement ("collect_wood" -> "chop tree").
const std::map<std::string, std::string>& achievement_goals();

// The 22 canonical goal strings in achievement order; the scripted oracle
// suggests the subset whose context preconditions currently hold.
const std::vector<std::string>& valid_goals();

// True when (verb, noun) can have an effect in some world state. "mine grass"
// never does; "chop grass" sometimes yields a plant.
bool combo_effective(const std::string& verb, const std::optional<std::string>& noun);

// Context precondition of a goal evaluated against an observation (visible
// kinds, inventory, status). Unknown goals are never context-valid.
bool goal_context_holds(const std::string& goal, const Observation& obs);

// --- world ---

struct GridcraftConfig {
  int width = 64;
  int height = 64;
  int view_rows = 7;
  int view_cols = 9;
  int episode_cap = 10000;
  int meter_interval = 50;   // food/drink/energy decay cadence
  int regen_interval = 50;   // health regeneration cadence
  int attack_damage = 3;     // mobs die in <= 2 hits
  int mob_max_health = 5;
  int mob_attack_cooldown = 2;
  int mob_respawn_ticks = 200;
  double sapling_probability = 0.3;
  int plant_ripen_ticks = 30;
  int num_cows = 4;
  int num_zombies = 2;
  int num_skeletons = 2;
  // Minimum per-kind counts adjacent to the reachable region; world
  // generation repairs any shortfall so every run can reach every resource.
  int min_trees = 6;
  int min_water = 4;
  int min_stone = 8;
  int min_coal = 3;
  int min_iron = 2;
  int min_diamond = 1;

  // Small dense map for fast desk-scale training runs.
  static GridcraftConfig desk();

  static GridcraftConfig from_json_file(const std::string& path);
  std::string to_json() const;
};

struct Recipe {
  std::string product;
  std::map<std::string, int> ingredients;
  std::vector<std::string> stations;        // placements that must be in view
  std::optional<std::string> tool_tier;     // unused by the default recipe set
};

// Craft/place recipe table keyed by product token.
const std::map<std::string, Recipe>& recipes();

struct Mob {
  std::string kind;  // cow, zombie, skeleton
  int row = 0;
  int col = 0;
  int health = 0;
  int attack_cooldown = 0;
  int respawn_in = 0;  // > 0 while dead and waiting to respawn
};

struct Placement {
  std::string kind;  // crafting table, furnace, plant
  int row = 0;
  int col = 0;
  int ripe_at_tick = -1;  // plants only
};

struct AgentState {
  int row = 0;
  int col = 0;
  int facing_dr = -1;  // starts facing up
  int facing_dc = 0;
  int health = 9;
  int food = 9;
  int drink = 9;
  int energy = 9;
  bool sleeping = false;
};

struct WorldState {
  int width = 0;
  int height = 0;
  std::vector<std::string> tiles;  // row-major terrain tokens
  std::vector<Mob> mobs;
  std::vector<Placement> placements;
  AgentState agent;
  std::map<std::string, int> inventory;
  std::int64_t tick = 0;

  const std::string& tile(int row, int col) const { return tiles[static_cast<size_t>(row) * width + col]; }
  std::string& tile(int row, int col) { return tiles[static_cast<size_t>(row) * width + col]; }
  bool in_bounds(int row, int col) const { return row >= 0 && row < height && col >= 0 && col < width; }
  const Mob* mob_at(int row, int col) const;
  const Placement* placement_at(int row, int col) const;
};

// Deterministic procedural generation; a repair pass guarantees the
// configured minimum resource counts adjacent to the region reachable from
// spawn.
WorldState generate_world(std::uint64_t seed, const GridcraftConfig& config);

struct ActionEffects {
  std::vector<std::string> events;            // raw effect tokens, before first-unlock filtering
  std::optional<ActionSpec> outcome;
};

// Applies one agent action. Invalid verb+noun combinations are silent no-ops;
// the outcome is populated when the action had an effect or the noun matched
// the faced cell.
ActionEffects apply_action(WorldState& world, const ActionSpec& action,
                           const GridcraftConfig& config, Rng& rng);

Observation observe(const WorldState& world, const GridcraftConfig& config);

class GridcraftEnv final : public Environment {
 public:
  explicit GridcraftEnv(GridcraftConfig config = GridcraftConfig{});

  const std::vector<ActionSpec>& actions() const override { return actions_; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(const ActionSpec& action) override;
  const EpisodeLedger& ledger() const override { return ledger_; }
  EpisodeLedger& ledger() override { return ledger_; }

  const GridcraftConfig& config() const { return config_; }
  const WorldState& world() const { return world_; }
  const std::set<std::string>& unlocked() const { return unlocked_; }

 private:
  GridcraftConfig config_;
  std::vector<ActionSpec> actions_;
  WorldState world_;
  Rng rng_;
  EpisodeLedger ledger_;
  std::set<std::string> unlocked_;  // achievements already emitted this episode
};

// --- downstream tasks (transfer targets) ---

const std::vector<std::string>& downstream_tasks();

struct TaskProgress {
  int subtask_index = 0;
  int chop_count = 0;
  bool done = false;
  std::set<std::string> seen_events;
};

// Sparse 0/1 completion reward, except mine_stone which pays once per subtask
// and game_reward which pays per first-unlock achievement.
double downstream_task_reward(const std::string& task, const StepResult& step,
                              const WorldState& world, TaskProgress& progress);

// Ordered subgoal captions for a task, used as the goal text of
// goal-conditioned transfer agents.
std::vector<std::string> task_subgoals(const std::string& task);

}  // namespace ellm::gridcraft
