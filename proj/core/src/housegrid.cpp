#include "ellm/housegrid.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "ellm/errors.hpp"

namespace ellm::housegrid {

using nlohmann::json;

const TaskObject* RearrangementTask::object(const std::string& name) const {
  for (const auto& obj : objects) {
    if (obj.name == name) return &obj;
  }
  return nullptr;
}

namespace {

RearrangementTask task_from_json(const json& j) {
  RearrangementTask task;
  task.id = j.at("id").get<int>();
  task.receptacles = j.at("receptacles").get<std::vector<std::string>>();
  for (const auto& obj : j.at("objects")) {
    TaskObject object;
    object.name = obj.at("name").get<std::string>();
    object.start = obj.at("start").get<std::string>();
    object.correct = obj.at("correct").get<std::vector<std::string>>();
    task.objects.push_back(std::move(object));
  }
  for (const auto& object : task.objects) {
    if (std::find(task.receptacles.begin(), task.receptacles.end(), object.start) ==
        task.receptacles.end()) {
      throw ConfigError("task " + std::to_string(task.id) + ": start receptacle '" +
                        object.start + "' is not in the receptacle list");
    }
    if (std::find(object.correct.begin(), object.correct.end(), object.start) !=
        object.correct.end()) {
      throw ConfigError("task " + std::to_string(task.id) + ": object '" + object.name +
                        "' starts in a correct receptacle; objects must begin misplaced");
    }
  }
  return task;
}

json read_tasks_file(const std::string& tasks_file) {
  std::ifstream in(tasks_file);
  if (!in) throw ConfigError("cannot open task definition file: " + tasks_file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("bad task definition file " + tasks_file + ": " + ex.what());
  }
  if (j.value("version", 0) != 1) {
    throw ConfigError("unsupported task definition version in " + tasks_file);
  }
  return j;
}

}  // namespace

std::vector<RearrangementTask> load_all_tasks(const std::string& tasks_file) {
  const json j = read_tasks_file(tasks_file);
  std::vector<RearrangementTask> tasks;
  for (const auto& entry : j.at("tasks")) {
    tasks.push_back(task_from_json(entry));
  }
  return tasks;
}

RearrangementTask load_task(const std::string& tasks_file, int task_id) {
  for (auto& task : load_all_tasks(tasks_file)) {
    if (task.id == task_id) return task;
  }
  throw ConfigError("unknown housegrid task id: " + std::to_string(task_id));
}

double success_rate(const RearrangementTask& task,
                    const std::map<std::string, std::string>& placements) {
  if (task.objects.empty()) return 0.0;
  int correct = 0;
  for (const auto& object : task.objects) {
    auto it = placements.find(object.name);
    if (it == placements.end()) continue;
    if (std::find(object.correct.begin(), object.correct.end(), it->second) !=
        object.correct.end()) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(task.objects.size());
}

// --- environment ---

HousegridEnv::HousegridEnv(RearrangementTask task, HousegridConfig config)
    : task_(std::move(task)), config_(config) {
  actions_.push_back(ActionSpec{"forward", std::nullopt});
  actions_.push_back(ActionSpec{"turn left", std::nullopt});
  actions_.push_back(ActionSpec{"turn right", std::nullopt});
  actions_.push_back(ActionSpec{"look up", std::nullopt});
  actions_.push_back(ActionSpec{"look down", std::nullopt});
  for (const auto& object : task_.objects) {
    actions_.push_back(ActionSpec{"pick", object.name});
  }
  for (const auto& receptacle : task_.receptacles) {
    actions_.push_back(ActionSpec{"place", receptacle});
  }
}

std::vector<std::string> HousegridEnv::expressible_goals(const RearrangementTask& task) {
  std::vector<std::string> goals;
  for (const auto& object : task.objects) {
    goals.push_back("pick " + object.name);
  }
  for (const auto& object : task.objects) {
    for (const auto& receptacle : task.receptacles) {
      goals.push_back("place " + object.name + " in/on " + receptacle);
    }
  }
  return goals;
}

const HousegridEnv::ReceptacleCell* HousegridEnv::receptacle_at(int row, int col) const {
  for (const auto& receptacle : receptacles_) {
    if (receptacle.row == row && receptacle.col == col) return &receptacle;
  }
  return nullptr;
}

HousegridEnv::ReceptacleCell* HousegridEnv::receptacle_at(int row, int col) {
  for (auto& receptacle : receptacles_) {
    if (receptacle.row == row && receptacle.col == col) return &receptacle;
  }
  return nullptr;
}

Observation HousegridEnv::reset(std::uint64_t /*seed*/) {
  // The scene is fully specified by the task; the seed is accepted for
  // interface parity and reserved for future scene randomization.
  receptacles_.clear();
  const int n = config_.room_size;
  // Ring of inner-border cells, clockwise from the top-left corner.
  std::vector<std::pair<int, int>> ring;
  for (int c = 1; c < n - 1; ++c) ring.emplace_back(1, c);
  for (int r = 2; r < n - 1; ++r) ring.emplace_back(r, n - 2);
  for (int c = n - 3; c >= 1; --c) ring.emplace_back(n - 2, c);
  for (int r = n - 3; r >= 2; --r) ring.emplace_back(r, 1);

  const size_t count = task_.receptacles.size();
  for (size_t i = 0; i < count; ++i) {
    const auto& [row, col] = ring[i * ring.size() / count];
    receptacles_.push_back(ReceptacleCell{task_.receptacles[i], row, col, {}});
  }
  for (const auto& object : task_.objects) {
    for (auto& receptacle : receptacles_) {
      if (receptacle.name == object.start) {
        receptacle.objects.push_back(object.name);
        break;
      }
    }
  }

  holding_.reset();
  agent_row_ = n / 2;
  agent_col_ = n / 2;
  facing_dr_ = -1;
  facing_dc_ = 0;
  tick_ = 0;
  ledger_.clear();
  seen_receptacles_.clear();
  for (const auto& receptacle : receptacles_) {
    seen_receptacles_.push_back(receptacle.name);
  }
  return observe();
}

Observation HousegridEnv::observe() const {
  Observation obs;
  const int n = config_.room_size;
  const int radius = n - 1;
  obs.view_rows = 2 * radius + 1;
  obs.view_cols = 2 * radius + 1;
  obs.local_view.resize(static_cast<size_t>(obs.view_rows) * obs.view_cols);

  // Rotate offsets so the faced direction is always "up" in the view.
  for (int vr = -radius; vr <= radius; ++vr) {
    for (int vc = -radius; vc <= radius; ++vc) {
      const int wr = agent_row_ + vr * (-facing_dr_) + vc * facing_dc_;
      const int wc = agent_col_ + vr * (-facing_dc_) + vc * (-facing_dr_);
      Cell cell;
      if (wr < 0 || wr >= n || wc < 0 || wc >= n) {
        cell.kind = "";
      } else if (wr == 0 || wr == n - 1 || wc == 0 || wc == n - 1) {
        cell.kind = "wall";
      } else if (const ReceptacleCell* receptacle = receptacle_at(wr, wc)) {
        cell.kind = receptacle->name;
        cell.objects = receptacle->objects;
      } else {
        cell.kind = "floor";
      }
      obs.local_view[static_cast<size_t>(vr + radius) * obs.view_cols + (vc + radius)] =
          std::move(cell);
    }
  }

  const int face_r = agent_row_ + facing_dr_;
  const int face_c = agent_col_ + facing_dc_;
  if (const ReceptacleCell* receptacle = receptacle_at(face_r, face_c)) {
    obs.target = receptacle->name;
  }
  obs.holding = holding_;
  obs.seen_receptacles = seen_receptacles_;
  return obs;
}

StepResult HousegridEnv::step(const ActionSpec& action) {
  action_index(action);  // validates membership
  ledger_.step_count += 1;
  tick_ += 1;

  StepResult result;
  const int face_r = agent_row_ + facing_dr_;
  const int face_c = agent_col_ + facing_dc_;

  if (action.verb == "forward") {
    const int n = config_.room_size;
    const bool open = face_r > 0 && face_r < n - 1 && face_c > 0 && face_c < n - 1 &&
                      receptacle_at(face_r, face_c) == nullptr;
    if (open) {
      agent_row_ = face_r;
      agent_col_ = face_c;
      result.action_outcome = action;
    }
  } else if (action.verb == "turn left") {
    const int dr = -facing_dc_;
    const int dc = facing_dr_;
    facing_dr_ = dr;
    facing_dc_ = dc;
    result.action_outcome = action;
  } else if (action.verb == "turn right") {
    const int dr = facing_dc_;
    const int dc = -facing_dr_;
    facing_dr_ = dr;
    facing_dc_ = dc;
    result.action_outcome = action;
  } else if (action.verb == "look up" || action.verb == "look down") {
    // Retained for action-space fidelity; the scene is 2-D.
  } else if (action.verb == "pick" && action.noun) {
    if (!holding_) {
      if (ReceptacleCell* receptacle = receptacle_at(face_r, face_c)) {
        auto it = std::find(receptacle->objects.begin(), receptacle->objects.end(), *action.noun);
        if (it != receptacle->objects.end()) {
          receptacle->objects.erase(it);
          holding_ = *action.noun;
          result.action_outcome = action;
        }
      }
    }
  } else if (action.verb == "place" && action.noun) {
    if (holding_) {
      if (ReceptacleCell* receptacle = receptacle_at(face_r, face_c)) {
        if (receptacle->name == *action.noun) {
          receptacle->objects.push_back(*holding_);
          result.action_outcome = ActionSpec{"place", *holding_ + " in/on " + receptacle->name};
          holding_.reset();
        }
      }
    }
  }

  result.done = tick_ >= config_.episode_cap;
  result.observation = observe();
  return result;
}

std::map<std::string, std::string> HousegridEnv::placements() const {
  std::map<std::string, std::string> map;
  for (const auto& receptacle : receptacles_) {
    for (const auto& object : receptacle.objects) {
      map[object] = receptacle.name;
    }
  }
  return map;
}

}  // namespace ellm::housegrid
