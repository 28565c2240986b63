#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellm/env.hpp"
#include "ellm/rng.hpp"

namespace ellm::housegrid {

struct TaskObject {
  std::string name;
  std::string start;                  // starting receptacle, always misplaced
  std::vector<std::string> correct;   // ground-truth receptacles
};

struct RearrangementTask {
  int id = 0;
  std::vector<std::string> receptacles;
  std::vector<TaskObject> objects;

  const TaskObject* object(const std::string& name) const;
};

// Loads one of the four shipped tasks from the versioned task definition
// file. Unknown ids are a configuration error.
RearrangementTask load_task(const std::string& tasks_file, int task_id);
std::vector<RearrangementTask> load_all_tasks(const std::string& tasks_file);

// Fraction of task objects currently sitting in one of their ground-truth
// receptacles. Objects missing from the map (e.g. held) count as misplaced.
double success_rate(const RearrangementTask& task,
                    const std::map<std::string, std::string>& placements);

struct HousegridConfig {
  int room_size = 12;
  int episode_cap = 200;
};

// One-room rearrangement world. The agent turns and moves with low-level
// actions, picks a visible object from the faced receptacle and places the
// held object into the faced receptacle. The view is egocentric and rotated
// so that "ahead" is always up.
class HousegridEnv final : public Environment {
 public:
  explicit HousegridEnv(RearrangementTask task, HousegridConfig config = HousegridConfig{});

  const std::vector<ActionSpec>& actions() const override { return actions_; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(const ActionSpec& action) override;
  const EpisodeLedger& ledger() const override { return ledger_; }
  EpisodeLedger& ledger() override { return ledger_; }

  const RearrangementTask& task() const { return task_; }
  const HousegridConfig& config() const { return config_; }

  // Current object -> receptacle map; held objects are absent.
  std::map<std::string, std::string> placements() const;
  double current_success_rate() const { return success_rate(task_, placements()); }

  // Expressible goal strings: every "pick <object>" and
  // "place <object> in/on <receptacle>" combination.
  static std::vector<std::string> expressible_goals(const RearrangementTask& task);

 private:
  struct ReceptacleCell {
    std::string name;
    int row = 0;
    int col = 0;
    std::vector<std::string> objects;
  };

  Observation observe() const;
  const ReceptacleCell* receptacle_at(int row, int col) const;
  ReceptacleCell* receptacle_at(int row, int col);

  RearrangementTask task_;
  HousegridConfig config_;
  std::vector<ActionSpec> actions_;
  std::vector<ReceptacleCell> receptacles_;
  std::vector<std::string> seen_receptacles_;
  std::optional<std::string> holding_;
  int agent_row_ = 0;
  int agent_col_ = 0;
  int facing_dr_ = -1;
  int facing_dc_ = 0;
  std::int64_t tick_ = 0;
  EpisodeLedger ledger_;
};

}  // namespace ellm::housegrid
