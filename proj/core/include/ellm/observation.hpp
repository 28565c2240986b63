#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ellm/action.hpp"

namespace ellm {

// One cell of the agent's local view. `kind` is the dominant descriptor
// (mob > placement > terrain); `objects` lists contained items when the cell
// is a receptacle.
struct Cell {
  std::string kind;
  std::vector<std::string> objects;

  bool operator==(const Cell& other) const = default;
};

// Everything the captioners and feature encoders are allowed to consume.
// There is deliberately no back-pointer to hidden simulator state.
struct Observation {
  int view_rows = 0;
  int view_cols = 0;
  std::vector<Cell> local_view;  // row-major, view_rows * view_cols
  std::optional<std::string> target;
  std::map<std::string, int> inventory;
  std::set<std::string> status;                 // hungry, thirsty, sleepy, low health
  std::optional<std::string> holding;           // rearrangement env only
  std::vector<std::string> seen_receptacles;    // rearrangement env, first-seen order

  const Cell& at(int row, int col) const { return local_view[static_cast<size_t>(row) * view_cols + col]; }

  bool operator==(const Observation& other) const = default;
};

struct StepResult {
  Observation observation;
  std::vector<std::string> events;            // first-unlock achievement tokens
  std::optional<ActionSpec> action_outcome;   // present iff the attempt was context-valid
  bool done = false;
  double extrinsic_reward = 0.0;
};

// Per-episode record of goal strings already rewarded, used by the novelty
// filter. Cleared on reset.
struct EpisodeLedger {
  std::set<std::string> achieved_this_episode;
  std::int64_t step_count = 0;

  void clear() {
    achieved_this_episode.clear();
    step_count = 0;
  }
  bool achieved(const std::string& goal) const {
    return achieved_this_episode.count(goal) > 0;
  }
};

}  // namespace ellm
