#include "ellm/gridcraft.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "ellm/errors.hpp"

namespace ellm::gridcraft {

using nlohmann::json;

// --- vocabulary ---

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {
      "do nothing", "move left", "move right", "move up", "move down", "sleep",
      "mine",       "eat",       "attack",     "chop",    "drink",     "place",
      "make",
  };
  return v;
}

const std::vector<std::string>& nouns() {
  static const std::vector<std::string> n = {
      "zombie",        "skeleton",      "cow",          "tree",       "stone",
      "coal",          "iron",          "diamond",      "water",      "grass",
      "crafting table", "furnace",      "plant",        "wood pickaxe",
      "stone pickaxe", "iron pickaxe",  "wood sword",   "stone sword",
      "iron sword",
  };
  return n;
}

const std::vector<std::string>& cell_kinds() {
  static const std::vector<std::string> k = {
      "plant", "water", "grass",   "sand",    "path",     "tree",
      "cow",   "zombie", "skeleton", "stone",  "coal",     "iron",
      "diamond", "lava", "crafting table", "furnace",
  };
  return k;
}

const std::vector<std::string>& item_kinds() {
  static const std::vector<std::string> k = {
      "wood",         "stone",         "coal",       "iron",       "diamond",
      "plant",        "wood pickaxe",  "stone pickaxe", "iron pickaxe",
      "wood sword",   "stone sword",   "iron sword",
  };
  return k;
}

const std::vector<std::string>& achievements() {
  static const std::vector<std::string> a = {
      "collect_wood",    "place_table",      "eat_cow",         "collect_sapling",
      "collect_drink",   "collect_stone",    "place_stone",     "eat_plant",
      "defeat_zombie",   "defeat_skeleton",  "make_wood_pickaxe", "make_wood_sword",
      "place_plant",     "place_furnace",    "collect_coal",    "collect_iron",
      "make_stone_pickaxe", "make_stone_sword", "collect_diamond", "make_iron_pickaxe",
      "make_iron_sword", "wake_up",
  };
  return a;
}

const std::map<std::string, std::vector<std::string>>& achievement_prerequisites() {
  static const std::map<std::string, std::vector<std::string>> p = {
      {"collect_wood", {}},
      {"place_table", {"collect_wood"}},
      {"eat_cow", {}},
      {"collect_sapling", {}},
      {"collect_drink", {}},
      {"collect_stone", {"make_wood_pickaxe"}},
      {"place_stone", {"collect_stone"}},
      {"eat_plant", {"place_plant"}},
      {"defeat_zombie", {}},
      {"defeat_skeleton", {}},
      {"make_wood_pickaxe", {"place_table"}},
      {"make_wood_sword", {"place_table"}},
      {"place_plant", {"collect_sapling"}},
      {"place_furnace", {"collect_stone"}},
      {"collect_coal", {"make_wood_pickaxe"}},
      {"collect_iron", {"make_stone_pickaxe"}},
      {"make_stone_pickaxe", {"collect_stone"}},
      {"make_stone_sword", {"collect_stone"}},
      {"collect_diamond", {"make_iron_pickaxe"}},
      {"make_iron_pickaxe", {"place_furnace", "collect_iron"}},
      {"make_iron_sword", {"place_furnace", "collect_iron"}},
      {"wake_up", {}},
  };
  return p;
}

const std::map<std::string, std::string>& achievement_goals() {
  static const std::map<std::string, std::string> g = {
      {"collect_wood", "chop tree"},
      {"place_table", "place crafting table"},
      {"eat_cow", "eat cow"},
      {"collect_sapling", "chop grass"},
      {"collect_drink", "drink water"},
      {"collect_stone", "mine stone"},
      {"place_stone", "place stone"},
      {"eat_plant", "eat plant"},
      {"defeat_zombie", "attack zombie"},
      {"defeat_skeleton", "attack skeleton"},
      {"make_wood_pickaxe", "make wood pickaxe"},
      {"make_wood_sword", "make wood sword"},
      {"place_plant", "place plant"},
      {"place_furnace", "place furnace"},
      {"collect_coal", "mine coal"},
      {"collect_iron", "mine iron"},
      {"make_stone_pickaxe", "make stone pickaxe"},
      {"make_stone_sword", "make stone sword"},
      {"collect_diamond", "mine diamond"},
      {"make_iron_pickaxe", "make iron pickaxe"},
      {"make_iron_sword", "make iron sword"},
      {"wake_up", "sleep"},
  };
  return g;
}

const std::vector<std::string>& valid_goals() {
  static const std::vector<std::string> goals = [] {
    std::vector<std::string> out;
    for (const auto& achievement : achievements()) {
      out.push_back(achievement_goals().at(achievement));
    }
    return out;
  }();
  return goals;
}

const std::map<std::string, Recipe>& recipes() {
  static const std::map<std::string, Recipe> r = {
      {"crafting table", {"crafting table", {{"wood", 1}}, {}, std::nullopt}},
      {"furnace", {"furnace", {{"stone", 1}}, {"crafting table"}, std::nullopt}},
      {"wood pickaxe", {"wood pickaxe", {{"wood", 1}}, {"crafting table"}, std::nullopt}},
      {"wood sword", {"wood sword", {{"wood", 1}}, {"crafting table"}, std::nullopt}},
      {"stone pickaxe", {"stone pickaxe", {{"wood", 1}, {"stone", 1}}, {"crafting table"}, std::nullopt}},
      {"stone sword", {"stone sword", {{"wood", 1}, {"stone", 1}}, {"crafting table"}, std::nullopt}},
      {"iron pickaxe",
       {"iron pickaxe", {{"wood", 1}, {"coal", 1}, {"iron", 1}}, {"crafting table", "furnace"}, std::nullopt}},
      {"iron sword",
       {"iron sword", {{"wood", 1}, {"coal", 1}, {"iron", 1}}, {"crafting table", "furnace"}, std::nullopt}},
  };
  return r;
}

bool combo_effective(const std::string& verb, const std::optional<std::string>& noun) {
  if (verb == "do nothing" || verb == "move left" || verb == "move right" ||
      verb == "move up" || verb == "move down") {
    return !noun.has_value();
  }
  if (verb == "sleep") return !noun.has_value();
  if (!noun) return false;
  const std::string& n = *noun;
  if (verb == "chop") return n == "tree" || n == "grass";
  if (verb == "mine") return n == "stone" || n == "coal" || n == "iron" || n == "diamond";
  if (verb == "drink") return n == "water";
  if (verb == "eat") return n == "cow" || n == "plant";
  if (verb == "attack") return n == "zombie" || n == "skeleton" || n == "cow";
  if (verb == "place") {
    return n == "crafting table" || n == "furnace" || n == "plant" || n == "stone";
  }
  if (verb == "make") {
    return recipes().count(n) > 0;
  }
  return false;
}

namespace {

bool sees(const Observation& obs, const std::string& kind) {
  for (const auto& cell : obs.local_view) {
    if (cell.kind == kind) return true;
  }
  return false;
}

int inv_count(const Observation& obs, const std::string& item) {
  auto it = obs.inventory.find(item);
  return it == obs.inventory.end() ? 0 : it->second;
}

bool has_pickaxe_tier(const Observation& obs, int tier) {
  // tiers: 1 wood, 2 stone, 3 iron
  if (tier <= 1 && inv_count(obs, "wood pickaxe") > 0) return true;
  if (tier <= 2 && inv_count(obs, "stone pickaxe") > 0) return true;
  if (inv_count(obs, "iron pickaxe") > 0) return true;
  return false;
}

bool recipe_context_holds(const Observation& obs, const Recipe& recipe) {
  for (const auto& [item, count] : recipe.ingredients) {
    if (inv_count(obs, item) < count) return false;
  }
  for (const auto& station : recipe.stations) {
    if (!sees(obs, station)) return false;
  }
  return true;
}

}  // namespace

bool goal_context_holds(const std::string& goal, const Observation& obs) {
  if (goal == "chop tree") return sees(obs, "tree");
  if (goal == "chop grass") return sees(obs, "grass");
  if (goal == "drink water") return sees(obs, "water");
  if (goal == "eat cow" || goal == "attack cow") return sees(obs, "cow");
  if (goal == "eat plant") return sees(obs, "plant");
  if (goal == "attack zombie") return sees(obs, "zombie");
  if (goal == "attack skeleton") return sees(obs, "skeleton");
  if (goal == "mine stone") return sees(obs, "stone") && has_pickaxe_tier(obs, 1);
  if (goal == "mine coal") return sees(obs, "coal") && has_pickaxe_tier(obs, 1);
  if (goal == "mine iron") return sees(obs, "iron") && has_pickaxe_tier(obs, 2);
  if (goal == "mine diamond") return sees(obs, "diamond") && has_pickaxe_tier(obs, 3);
  if (goal == "place stone") return inv_count(obs, "stone") > 0;
  if (goal == "place plant") return inv_count(obs, "plant") > 0;
  if (goal == "sleep") return obs.status.count("sleepy") > 0;
  if (goal == "place crafting table" || goal == "make crafting table") {
    return recipe_context_holds(obs, recipes().at("crafting table"));
  }
  if (goal == "place furnace" || goal == "make furnace") {
    return recipe_context_holds(obs, recipes().at("furnace"));
  }
  if (goal.rfind("make ", 0) == 0) {
    const std::string product = goal.substr(5);
    auto it = recipes().find(product);
    if (it == recipes().end()) return false;
    return recipe_context_holds(obs, it->second);
  }
  if (goal == "do nothing" || goal.rfind("move ", 0) == 0) return true;
  return false;
}

// --- config ---

GridcraftConfig GridcraftConfig::desk() {
  GridcraftConfig c;
  c.width = 24;
  c.height = 24;
  c.episode_cap = 400;
  c.meter_interval = 40;
  c.regen_interval = 40;
  c.mob_respawn_ticks = 100;
  c.num_cows = 3;
  c.num_zombies = 1;
  c.num_skeletons = 1;
  c.min_trees = 8;
  c.min_water = 6;
  c.min_stone = 8;
  c.min_coal = 3;
  c.min_iron = 2;
  c.min_diamond = 1;
  return c;
}

namespace {

json config_to_json(const GridcraftConfig& c) {
  return json{
      {"width", c.width},
      {"height", c.height},
      {"view_rows", c.view_rows},
      {"view_cols", c.view_cols},
      {"episode_cap", c.episode_cap},
      {"meter_interval", c.meter_interval},
      {"regen_interval", c.regen_interval},
      {"attack_damage", c.attack_damage},
      {"mob_max_health", c.mob_max_health},
      {"mob_attack_cooldown", c.mob_attack_cooldown},
      {"mob_respawn_ticks", c.mob_respawn_ticks},
      {"sapling_probability", c.sapling_probability},
      {"plant_ripen_ticks", c.plant_ripen_ticks},
      {"num_cows", c.num_cows},
      {"num_zombies", c.num_zombies},
      {"num_skeletons", c.num_skeletons},
      {"min_trees", c.min_trees},
      {"min_water", c.min_water},
      {"min_stone", c.min_stone},
      {"min_coal", c.min_coal},
      {"min_iron", c.min_iron},
      {"min_diamond", c.min_diamond},
      {"verbs", verbs()},
      {"nouns", nouns()},
  };
}

}  // namespace

std::string GridcraftConfig::to_json() const { return config_to_json(*this).dump(2); }

GridcraftConfig GridcraftConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gridcraft config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("bad gridcraft config " + path + ": " + ex.what());
  }
  GridcraftConfig c;
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.view_rows = j.value("view_rows", c.view_rows);
  c.view_cols = j.value("view_cols", c.view_cols);
  c.episode_cap = j.value("episode_cap", c.episode_cap);
  c.meter_interval = j.value("meter_interval", c.meter_interval);
  c.regen_interval = j.value("regen_interval", c.regen_interval);
  c.attack_damage = j.value("attack_damage", c.attack_damage);
  c.mob_max_health = j.value("mob_max_health", c.mob_max_health);
  c.mob_attack_cooldown = j.value("mob_attack_cooldown", c.mob_attack_cooldown);
  c.mob_respawn_ticks = j.value("mob_respawn_ticks", c.mob_respawn_ticks);
  c.sapling_probability = j.value("sapling_probability", c.sapling_probability);
  c.plant_ripen_ticks = j.value("plant_ripen_ticks", c.plant_ripen_ticks);
  c.num_cows = j.value("num_cows", c.num_cows);
  c.num_zombies = j.value("num_zombies", c.num_zombies);
  c.num_skeletons = j.value("num_skeletons", c.num_skeletons);
  c.min_trees = j.value("min_trees", c.min_trees);
  c.min_water = j.value("min_water", c.min_water);
  c.min_stone = j.value("min_stone", c.min_stone);
  c.min_coal = j.value("min_coal", c.min_coal);
  c.min_iron = j.value("min_iron", c.min_iron);
  c.min_diamond = j.value("min_diamond", c.min_diamond);
  if (j.contains("verbs") && j.at("verbs").get<std::vector<std::string>>() != verbs()) {
    throw ConfigError("custom verb lists are not supported by the gridcraft mechanics");
  }
  if (j.contains("nouns") && j.at("nouns").get<std::vector<std::string>>() != nouns()) {
    throw ConfigError("custom noun lists are not supported by the gridcraft mechanics");
  }
  return c;
}

// --- world state helpers ---

const Mob* WorldState::mob_at(int row, int col) const {
  for (const auto& mob : mobs) {
    if (mob.respawn_in == 0 && mob.row == row && mob.col == col) return &mob;
  }
  return nullptr;
}

const Placement* WorldState::placement_at(int row, int col) const {
  for (const auto& placement : placements) {
    if (placement.row == row && placement.col == col) return &placement;
  }
  return nullptr;
}

namespace {

bool terrain_walkable(const std::string& tile) {
  return tile == "grass" || tile == "sand" || tile == "path" || tile == "lava";
}

bool world_has_pickaxe(const WorldState& world, int tier) {
  auto has = [&](const char* item) {
    auto it = world.inventory.find(item);
    return it != world.inventory.end() && it->second > 0;
  };
  if (tier <= 1 && has("wood pickaxe")) return true;
  if (tier <= 2 && has("stone pickaxe")) return true;
  return has("iron pickaxe");
}

bool cell_free(const WorldState& world, int row, int col) {
  if (!world.in_bounds(row, col)) return false;
  if (!terrain_walkable(world.tile(row, col))) return false;
  if (world.mob_at(row, col)) return false;
  if (world.placement_at(row, col)) return false;
  if (world.agent.row == row && world.agent.col == col) return false;
  return true;
}

// Descriptor priority: mob > placement > terrain.
std::string cell_descriptor(const WorldState& world, int row, int col) {
  if (const Mob* mob = world.mob_at(row, col)) return mob->kind;
  if (const Placement* placement = world.placement_at(row, col)) return placement->kind;
  return world.tile(row, col);
}

struct NoiseField {
  int coarse_w = 0;
  int coarse_h = 0;
  int scale = 6;
  std::vector<double> values;

  double at(int row, int col) const {
    const double fr = static_cast<double>(row) / scale;
    const double fc = static_cast<double>(col) / scale;
    const int r0 = static_cast<int>(fr);
    const int c0 = static_cast<int>(fc);
    const double tr = fr - r0;
    const double tc = fc - c0;
    auto v = [&](int r, int c) {
      r = std::min(r, coarse_h - 1);
      c = std::min(c, coarse_w - 1);
      return values[static_cast<size_t>(r) * coarse_w + c];
    };
    const double top = v(r0, c0) * (1 - tc) + v(r0, c0 + 1) * tc;
    const double bottom = v(r0 + 1, c0) * (1 - tc) + v(r0 + 1, c0 + 1) * tc;
    return top * (1 - tr) + bottom * tr;
  }
};

NoiseField make_noise(int width, int height, int scale, Rng& rng) {
  NoiseField field;
  field.scale = scale;
  field.coarse_w = width / scale + 2;
  field.coarse_h = height / scale + 2;
  field.values.resize(static_cast<size_t>(field.coarse_w) * field.coarse_h);
  for (double& v : field.values) v = rng.next_unit();
  return field;
}

}  // namespace

WorldState generate_world(std::uint64_t seed, const GridcraftConfig& config) {
  Rng rng(seed, "worldgen");
  WorldState world;
  world.width = config.width;
  world.height = config.height;
  world.tiles.assign(static_cast<size_t>(config.width) * config.height, "grass");

  const NoiseField elevation = make_noise(config.width, config.height, 6, rng);
  const NoiseField moisture = make_noise(config.width, config.height, 5, rng);

  for (int r = 0; r < config.height; ++r) {
    for (int c = 0; c < config.width; ++c) {
      const double e = elevation.at(r, c);
      const double m = moisture.at(r, c);
      const double u = rng.next_unit();
      std::string tile = "grass";
      if (e > 0.78) {
        tile = "stone";
        if (u < 0.10) tile = "coal";
        else if (e > 0.84 && u < 0.17) tile = "iron";
        else if (e > 0.90 && u < 0.22) tile = "diamond";
        else if (e > 0.92 && u < 0.26) tile = "lava";
      } else if (e < 0.30) {
        tile = "water";
      } else if (e < 0.35) {
        tile = "sand";
      } else if (m > 0.60 && u < 0.5) {
        tile = "tree";
      }
      world.tile(r, c) = tile;
    }
  }

  // Spawn on the grass cell nearest the map center.
  const int cr = config.height / 2;
  const int cc = config.width / 2;
  int best_r = cr, best_c = cc, best_d = 1 << 30;
  for (int r = 0; r < config.height; ++r) {
    for (int c = 0; c < config.width; ++c) {
      if (world.tile(r, c) != "grass") continue;
      const int d = (r - cr) * (r - cr) + (c - cc) * (c - cc);
      if (d < best_d) {
        best_d = d;
        best_r = r;
        best_c = c;
      }
    }
  }
  world.tile(best_r, best_c) = "grass";
  world.agent.row = best_r;
  world.agent.col = best_c;

  // Reachable region from spawn, breadth-first over walkable terrain.
  std::vector<char> reached(world.tiles.size(), 0);
  std::vector<int> depth(world.tiles.size(), 0);
  std::deque<std::pair<int, int>> queue;
  std::vector<std::pair<int, int>> reachable_order;
  auto idx = [&](int r, int c) { return static_cast<size_t>(r) * config.width + c; };
  queue.emplace_back(best_r, best_c);
  reached[idx(best_r, best_c)] = 1;
  const int dr4[] = {-1, 1, 0, 0};
  const int dc4[] = {0, 0, -1, 1};
  while (!queue.empty()) {
    auto [r, c] = queue.front();
    queue.pop_front();
    reachable_order.emplace_back(r, c);
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr4[k];
      const int nc = c + dc4[k];
      if (!world.in_bounds(nr, nc) || reached[idx(nr, nc)]) continue;
      const std::string& tile = world.tile(nr, nc);
      if (tile != "grass" && tile != "sand" && tile != "path") continue;
      reached[idx(nr, nc)] = 1;
      depth[idx(nr, nc)] = depth[idx(r, c)] + 1;
      queue.emplace_back(nr, nc);
    }
  }

  // Repair pass: guarantee the configured minimum count of each resource
  // adjacent to the reachable region, converting spaced-out reachable grass
  // cells when generation fell short.
  auto adjacent_reachable_count = [&](const std::string& kind) {
    int count = 0;
    for (int r = 0; r < config.height; ++r) {
      for (int c = 0; c < config.width; ++c) {
        if (world.tile(r, c) != kind) continue;
        for (int k = 0; k < 4; ++k) {
          const int nr = r + dr4[k];
          const int nc = c + dc4[k];
          if (world.in_bounds(nr, nc) && reached[idx(nr, nc)]) {
            ++count;
            break;
          }
        }
      }
    }
    return count;
  };

  // Two candidate tiers: well-connected grass first, then any reachable
  // grass, so later kinds never run out of conversion sites.
  std::vector<std::pair<int, int>> candidates;
  for (int min_neighbors : {3, 2, 1}) {
    for (const auto& [r, c] : reachable_order) {
      if (depth[idx(r, c)] < 2) continue;
      if (world.tile(r, c) != "grass") continue;
      int walkable_neighbors = 0;
      for (int k = 0; k < 4; ++k) {
        const int nr = r + dr4[k];
        const int nc = c + dc4[k];
        if (world.in_bounds(nr, nc) && reached[idx(nr, nc)]) ++walkable_neighbors;
      }
      if (walkable_neighbors == min_neighbors) candidates.emplace_back(r, c);
    }
  }

  size_t next_candidate = 0;
  auto ensure_kind = [&](const std::string& kind, int minimum) {
    int have = adjacent_reachable_count(kind);
    while (have < minimum && next_candidate < candidates.size()) {
      auto [r, c] = candidates[next_candidate];
      next_candidate += 1;
      if (world.tile(r, c) != "grass") continue;
      if (r == best_r && c == best_c) continue;
      world.tile(r, c) = kind;
      ++have;
    }
  };
  ensure_kind("tree", config.min_trees);
  ensure_kind("water", config.min_water);
  ensure_kind("stone", config.min_stone);
  ensure_kind("coal", config.min_coal);
  ensure_kind("iron", config.min_iron);
  ensure_kind("diamond", config.min_diamond);

  // Mobs spawn on reachable walkable cells; hostiles keep their distance from
  // spawn so early episodes are survivable.
  auto spawn_mob = [&](const std::string& kind, int min_depth) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      const auto& [r, c] = reachable_order[rng.next_below(reachable_order.size())];
      if (depth[idx(r, c)] < min_depth) continue;
      if (world.tile(r, c) != "grass") continue;
      if (world.mob_at(r, c) || (r == best_r && c == best_c)) continue;
      world.mobs.push_back(Mob{kind, r, c, config.mob_max_health, 0, 0});
      return;
    }
  };
  for (int i = 0; i < config.num_cows; ++i) spawn_mob("cow", 2);
  for (int i = 0; i < config.num_zombies; ++i) spawn_mob("zombie", 5);
  for (int i = 0; i < config.num_skeletons; ++i) spawn_mob("skeleton", 5);

  return world;
}

// --- action application ---

namespace {

struct Direction {
  int dr;
  int dc;
};

std::optional<Direction> move_direction(const std::string& verb) {
  if (verb == "move left") return Direction{0, -1};
  if (verb == "move right") return Direction{0, 1};
  if (verb == "move up") return Direction{-1, 0};
  if (verb == "move down") return Direction{1, 0};
  return std::nullopt;
}

Mob* mutable_mob_at(WorldState& world, int row, int col) {
  for (auto& mob : world.mobs) {
    if (mob.respawn_in == 0 && mob.row == row && mob.col == col) return &mob;
  }
  return nullptr;
}

// A station counts as nearby when it falls inside the local view window, so
// craftability matches what the captioner and oracle can see.
bool station_nearby(const WorldState& world, const GridcraftConfig& config,
                    const std::string& kind) {
  for (const auto& placement : world.placements) {
    if (placement.kind != kind) continue;
    if (std::abs(placement.row - world.agent.row) <= config.view_rows / 2 &&
        std::abs(placement.col - world.agent.col) <= config.view_cols / 2) {
      return true;
    }
  }
  return false;
}

bool consume_ingredients(WorldState& world, const GridcraftConfig& config, const Recipe& recipe) {
  for (const auto& [item, count] : recipe.ingredients) {
    auto it = world.inventory.find(item);
    if (it == world.inventory.end() || it->second < count) return false;
  }
  for (const auto& station : recipe.stations) {
    if (!station_nearby(world, config, station)) return false;
  }
  for (const auto& [item, count] : recipe.ingredients) {
    auto it = world.inventory.find(item);
    it->second -= count;
    if (it->second == 0) world.inventory.erase(it);
  }
  return true;
}

bool buildable_cell(const WorldState& world, int row, int col) {
  if (!world.in_bounds(row, col)) return false;
  const std::string& tile = world.tile(row, col);
  if (tile != "grass" && tile != "sand" && tile != "path") return false;
  if (world.mob_at(row, col) || world.placement_at(row, col)) return false;
  return true;
}

void kill_mob(WorldState& world, Mob& mob, const GridcraftConfig& config,
              std::vector<std::string>& events) {
  if (mob.kind == "cow") {
    world.agent.food = std::min(9, world.agent.food + 6);
    events.push_back("eat_cow");
  } else if (mob.kind == "zombie") {
    events.push_back("defeat_zombie");
  } else if (mob.kind == "skeleton") {
    events.push_back("defeat_skeleton");
  }
  mob.respawn_in = config.mob_respawn_ticks;
  mob.health = config.mob_max_health;
}

}  // namespace

ActionEffects apply_action(WorldState& world, const ActionSpec& action,
                           const GridcraftConfig& config, Rng& rng) {
  ActionEffects effects;
  AgentState& agent = world.agent;
  const int face_r = agent.row + agent.facing_dr;
  const int face_c = agent.col + agent.facing_dc;
  const std::string faced =
      world.in_bounds(face_r, face_c) ? cell_descriptor(world, face_r, face_c) : std::string();
  const bool context_valid = action.noun.has_value() && faced == *action.noun;
  bool effect = false;

  const std::string& verb = action.verb;
  if (auto dir = move_direction(verb)) {
    agent.facing_dr = dir->dr;
    agent.facing_dc = dir->dc;
    const int nr = agent.row + dir->dr;
    const int nc = agent.col + dir->dc;
    if (cell_free(world, nr, nc)) {
      agent.row = nr;
      agent.col = nc;
      effect = true;
      if (world.tile(nr, nc) == "lava") agent.health = 0;
    }
  } else if (verb == "sleep" ) {
    if (agent.energy < 9) {
      agent.energy = std::min(9, agent.energy + 2);
      effect = true;
      if (agent.energy == 9) effects.events.push_back("wake_up");
    }
  } else if (verb == "chop" && action.noun) {
    if (*action.noun == "tree" && faced == "tree") {
      world.inventory["wood"] += 1;
      effects.events.push_back("collect_wood");
      effect = true;
    } else if (*action.noun == "grass" && faced == "grass") {
      if (rng.next_bool(config.sapling_probability)) {
        world.inventory["plant"] += 1;
        effects.events.push_back("collect_sapling");
        effect = true;
      }
    }
  } else if (verb == "mine" && action.noun && faced == *action.noun) {
    const std::string& noun = *action.noun;
    int tier = 0;
    if (noun == "stone" || noun == "coal") tier = 1;
    else if (noun == "iron") tier = 2;
    else if (noun == "diamond") tier = 3;
    if (tier > 0 && world_has_pickaxe(world, tier)) {
      world.inventory[noun] += 1;
      world.tile(face_r, face_c) = "path";
      effects.events.push_back("collect_" + noun);
      effect = true;
    }
  } else if (verb == "drink" && action.noun && *action.noun == "water" && faced == "water") {
    agent.drink = std::min(9, agent.drink + 1);
    effects.events.push_back("collect_drink");
    effect = true;
  } else if ((verb == "eat" || verb == "attack") && action.noun) {
    const std::string& noun = *action.noun;
    const bool damaging =
        (verb == "attack" && (noun == "zombie" || noun == "skeleton" || noun == "cow")) ||
        (verb == "eat" && noun == "cow");
    if (damaging && faced == noun) {
      if (Mob* mob = mutable_mob_at(world, face_r, face_c)) {
        mob->health -= config.attack_damage;
        effect = true;
        if (mob->health <= 0) kill_mob(world, *mob, config, effects.events);
      }
    } else if (verb == "eat" && noun == "plant" && faced == "plant") {
      for (size_t i = 0; i < world.placements.size(); ++i) {
        Placement& placement = world.placements[i];
        if (placement.kind == "plant" && placement.row == face_r && placement.col == face_c &&
            placement.ripe_at_tick >= 0 && world.tick >= placement.ripe_at_tick) {
          agent.food = std::min(9, agent.food + 4);
          effects.events.push_back("eat_plant");
          world.placements.erase(world.placements.begin() + static_cast<long>(i));
          effect = true;
          break;
        }
      }
    }
  } else if ((verb == "place" || verb == "make") && action.noun) {
    const std::string& noun = *action.noun;
    if (noun == "crafting table" || noun == "furnace") {
      if (buildable_cell(world, face_r, face_c) &&
          consume_ingredients(world, config, recipes().at(noun))) {
        world.placements.push_back(Placement{noun, face_r, face_c, -1});
        effects.events.push_back(noun == "crafting table" ? "place_table" : "place_furnace");
        effect = true;
      }
    } else if (verb == "place" && noun == "stone") {
      const bool placeable = world.in_bounds(face_r, face_c) && !world.mob_at(face_r, face_c) &&
                             !world.placement_at(face_r, face_c) &&
                             (world.tile(face_r, face_c) == "grass" || world.tile(face_r, face_c) == "sand" ||
                              world.tile(face_r, face_c) == "path" || world.tile(face_r, face_c) == "water");
      auto it = world.inventory.find("stone");
      if (placeable && it != world.inventory.end() && it->second > 0) {
        it->second -= 1;
        if (it->second == 0) world.inventory.erase(it);
        world.tile(face_r, face_c) = "stone";
        effects.events.push_back("place_stone");
        effect = true;
      }
    } else if (verb == "place" && noun == "plant") {
      auto it = world.inventory.find("plant");
      if (world.in_bounds(face_r, face_c) && world.tile(face_r, face_c) == "grass" &&
          !world.mob_at(face_r, face_c) && !world.placement_at(face_r, face_c) &&
          it != world.inventory.end() && it->second > 0) {
        it->second -= 1;
        if (it->second == 0) world.inventory.erase(it);
        world.placements.push_back(
            Placement{"plant", face_r, face_c, static_cast<int>(world.tick) + config.plant_ripen_ticks});
        effects.events.push_back("place_plant");
        effect = true;
      }
    } else if (verb == "make" && recipes().count(noun) > 0) {
      if (consume_ingredients(world, config, recipes().at(noun))) {
        world.inventory[noun] += 1;
        std::string event = "make_" + noun;
        std::replace(event.begin(), event.end(), ' ', '_');
        effects.events.push_back(event);
        effect = true;
      }
    }
  }

  if (effect || context_valid) effects.outcome = action;
  return effects;
}

// --- per-tick world dynamics ---

namespace {

void advance_world(WorldState& world, const GridcraftConfig& config, Rng& rng,
                   bool slept_this_step) {
  world.tick += 1;
  AgentState& agent = world.agent;

  for (auto& mob : world.mobs) {
    if (mob.respawn_in > 0) {
      mob.respawn_in -= 1;
      if (mob.respawn_in == 0) {
        bool placed = false;
        for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
          const int r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(world.height)));
          const int c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(world.width)));
          if (cell_free(world, r, c) && world.tile(r, c) == "grass" &&
              std::abs(r - agent.row) + std::abs(c - agent.col) >= 4) {
            mob.row = r;
            mob.col = c;
            mob.health = config.mob_max_health;
            placed = true;
          }
        }
        if (!placed) mob.respawn_in = config.mob_respawn_ticks;
      }
      continue;
    }

    const int dist = std::abs(mob.row - agent.row) + std::abs(mob.col - agent.col);
    const bool hostile = mob.kind != "cow";

    if (hostile && dist == 1) {
      if (mob.attack_cooldown == 0) {
        agent.health = std::max(0, agent.health - 1);
        mob.attack_cooldown = config.mob_attack_cooldown;
      } else {
        mob.attack_cooldown -= 1;
      }
      continue;
    }
    if (mob.attack_cooldown > 0) mob.attack_cooldown -= 1;

    const bool moves_now = (world.tick % 2) == 0;
    if (!moves_now) continue;

    int dr = 0, dc = 0;
    if (mob.kind == "zombie" && dist <= 8) {
      if (std::abs(mob.row - agent.row) >= std::abs(mob.col - agent.col)) {
        dr = agent.row > mob.row ? 1 : (agent.row < mob.row ? -1 : 0);
      } else {
        dc = agent.col > mob.col ? 1 : (agent.col < mob.col ? -1 : 0);
      }
    } else {
      const int k = static_cast<int>(rng.next_below(4));
      const int dr4[] = {-1, 1, 0, 0};
      const int dc4[] = {0, 0, -1, 1};
      dr = dr4[k];
      dc = dc4[k];
    }
    const int nr = mob.row + dr;
    const int nc = mob.col + dc;
    if (cell_free(world, nr, nc) && world.tile(nr, nc) != "lava") {
      mob.row = nr;
      mob.col = nc;
    }
  }

  if (world.tick % config.meter_interval == 0) {
    agent.food = std::max(0, agent.food - 1);
    agent.drink = std::max(0, agent.drink - 1);
    if (!slept_this_step) agent.energy = std::max(0, agent.energy - 1);
    if (agent.food == 0 || agent.drink == 0 || agent.energy == 0) {
      agent.health = std::max(0, agent.health - 1);
    }
  }
  if (world.tick % config.regen_interval == 0 && agent.food > 0 && agent.drink > 0 &&
      agent.energy > 0) {
    agent.health = std::min(9, agent.health + 1);
  }
}

std::optional<std::string> noun_for_kind(const std::string& kind) {
  const auto& noun_list = nouns();
  if (std::find(noun_list.begin(), noun_list.end(), kind) != noun_list.end()) return kind;
  return std::nullopt;
}

}  // namespace

Observation observe(const WorldState& world, const GridcraftConfig& config) {
  Observation obs;
  obs.view_rows = config.view_rows;
  obs.view_cols = config.view_cols;
  obs.local_view.reserve(static_cast<size_t>(config.view_rows) * config.view_cols);
  const int half_r = config.view_rows / 2;
  const int half_c = config.view_cols / 2;
  for (int vr = 0; vr < config.view_rows; ++vr) {
    for (int vc = 0; vc < config.view_cols; ++vc) {
      const int r = world.agent.row - half_r + vr;
      const int c = world.agent.col - half_c + vc;
      if (!world.in_bounds(r, c)) {
        obs.local_view.push_back(Cell{"", {}});
      } else {
        obs.local_view.push_back(Cell{cell_descriptor(world, r, c), {}});
      }
    }
  }
  const int face_r = world.agent.row + world.agent.facing_dr;
  const int face_c = world.agent.col + world.agent.facing_dc;
  if (world.in_bounds(face_r, face_c)) {
    obs.target = noun_for_kind(cell_descriptor(world, face_r, face_c));
  }
  for (const auto& [item, count] : world.inventory) {
    if (count > 0) obs.inventory[item] = count;
  }
  if (world.agent.food < 9) obs.status.insert("hungry");
  if (world.agent.drink < 9) obs.status.insert("thirsty");
  if (world.agent.energy < 9) obs.status.insert("sleepy");
  if (world.agent.health < 9) obs.status.insert("low health");
  return obs;
}

// --- environment ---

GridcraftEnv::GridcraftEnv(GridcraftConfig config)
    : config_(std::move(config)), actions_(enumerate_actions(verbs(), nouns())) {}

Observation GridcraftEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed, "env");
  world_ = generate_world(seed, config_);
  ledger_.clear();
  unlocked_.clear();
  return observe(world_, config_);
}

StepResult GridcraftEnv::step(const ActionSpec& action) {
  action_index(action);  // validates membership
  ledger_.step_count += 1;

  ActionEffects effects = apply_action(world_, action, config_, rng_);
  advance_world(world_, config_, rng_, action.verb == "sleep");

  StepResult result;
  result.action_outcome = effects.outcome;
  for (const auto& event : effects.events) {
    if (unlocked_.insert(event).second) result.events.push_back(event);
  }
  result.done = world_.agent.health <= 0 || world_.tick >= config_.episode_cap;
  result.observation = observe(world_, config_);
  return result;
}

// --- downstream tasks ---

const std::vector<std::string>& downstream_tasks() {
  static const std::vector<std::string> t = {
      "place_table", "attack_cow",  "make_wood_sword", "mine_stone",
      "deforestation", "gardening", "plant_row",       "game_reward",
  };
  return t;
}

std::vector<std::string> task_subgoals(const std::string& task) {
  if (task == "place_table") return {"chop tree", "place crafting table"};
  if (task == "attack_cow") return {"attack cow"};
  if (task == "make_wood_sword") {
    return {"chop tree", "place crafting table", "chop tree", "make wood sword"};
  }
  if (task == "mine_stone") {
    return {"chop tree", "place crafting table", "chop tree", "make wood pickaxe", "mine stone"};
  }
  if (task == "deforestation") return {"chop tree", "chop tree", "chop tree", "chop tree"};
  if (task == "gardening") return {"drink water", "chop grass"};
  if (task == "plant_row") return {"place plant", "place plant"};
  if (task == "game_reward") return {};
  throw ConfigError("unknown downstream task: " + task);
}

namespace {

bool outcome_is(const StepResult& step, const char* verb, const char* noun) {
  return step.action_outcome && step.action_outcome->verb == verb && step.action_outcome->noun &&
         *step.action_outcome->noun == noun;
}

bool has_event(const StepResult& step, const char* event) {
  return std::find(step.events.begin(), step.events.end(), event) != step.events.end();
}

}  // namespace

double downstream_task_reward(const std::string& task, const StepResult& step,
                              const WorldState& world, TaskProgress& progress) {
  if (std::find(downstream_tasks().begin(), downstream_tasks().end(), task) ==
      downstream_tasks().end()) {
    throw ConfigError("unknown downstream task: " + task);
  }
  for (const auto& event : step.events) progress.seen_events.insert(event);

  if (task == "game_reward") {
    return static_cast<double>(step.events.size());
  }
  if (task == "mine_stone") {
    // Semi-sparse: one payout per subtask, in order. The repeated chop-tree
    // subtask is tracked through outcomes because achievements only unlock
    // once per episode.
    static const char* kSubtaskEvents[] = {"collect_wood", "place_table", "collect_wood",
                                           "make_wood_pickaxe", "collect_stone"};
    if (progress.subtask_index < 5) {
      const std::string expected = kSubtaskEvents[progress.subtask_index];
      const bool hit = expected == "collect_wood"
                           ? outcome_is(step, "chop", "tree") || has_event(step, "collect_wood")
                           : has_event(step, expected.c_str());
      if (hit) {
        progress.subtask_index += 1;
        if (progress.subtask_index >= 5) progress.done = true;
        return 1.0;
      }
    }
    return 0.0;
  }
  if (progress.done) return 0.0;

  if (task == "place_table") {
    if (has_event(step, "place_table")) {
      progress.done = true;
      return 1.0;
    }
    return 0.0;
  }
  if (task == "attack_cow") {
    if (has_event(step, "eat_cow")) {
      progress.done = true;
      return 1.0;
    }
    return 0.0;
  }
  if (task == "make_wood_sword") {
    if (has_event(step, "make_wood_sword")) {
      progress.done = true;
      return 1.0;
    }
    return 0.0;
  }
  if (task == "deforestation") {
    if (outcome_is(step, "chop", "tree")) {
      progress.chop_count += 1;
      if (progress.chop_count >= 4) {
        progress.done = true;
        return 1.0;
      }
    }
    return 0.0;
  }
  if (task == "gardening") {
    if (progress.subtask_index == 0 && has_event(step, "collect_drink")) {
      progress.subtask_index = 1;
    } else if (progress.subtask_index == 1 && has_event(step, "collect_sapling")) {
      progress.done = true;
      return 1.0;
    }
    return 0.0;
  }
  if (task == "plant_row") {
    if (has_event(step, "place_plant") || outcome_is(step, "place", "plant")) {
      for (const auto& a : world.placements) {
        if (a.kind != "plant") continue;
        for (const auto& b : world.placements) {
          if (&a == &b || b.kind != "plant") continue;
          const bool adjacent = (a.row == b.row && std::abs(a.col - b.col) == 1) ||
                                (a.col == b.col && std::abs(a.row - b.row) == 1);
          if (adjacent) {
            progress.done = true;
            return 1.0;
          }
        }
      }
    }
    return 0.0;
  }
  return 0.0;
}

}  // namespace ellm::gridcraft
