#include "ellm/env.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace ellm {

using nlohmann::json;

int Environment::action_index(const ActionSpec& action) const {
  const auto& all = actions();
  for (size_t i = 0; i < all.size(); ++i) {
    if (all[i] == action) return static_cast<int>(i);
  }
  throw std::invalid_argument("action '" + action.text() + "' is outside the action space");
}

namespace {

json observation_to_json(const Observation& obs) {
  json view = json::array();
  for (const auto& cell : obs.local_view) {
    if (cell.objects.empty()) {
      view.push_back(cell.kind);
    } else {
      json entry = json::array({cell.kind});
      for (const auto& object : cell.objects) entry.push_back(object);
      view.push_back(std::move(entry));
    }
  }
  json j{
      {"view_rows", obs.view_rows},
      {"view_cols", obs.view_cols},
      {"view", std::move(view)},
      {"inventory", obs.inventory},
      {"status", obs.status},
      {"seen_receptacles", obs.seen_receptacles},
  };
  j["target"] = obs.target ? json(*obs.target) : json(nullptr);
  j["holding"] = obs.holding ? json(*obs.holding) : json(nullptr);
  return j;
}

Observation observation_from_json(const json& j) {
  Observation obs;
  obs.view_rows = j.at("view_rows").get<int>();
  obs.view_cols = j.at("view_cols").get<int>();
  for (const auto& cell : j.at("view")) {
    if (cell.is_array()) {
      Cell parsed{cell.at(0).get<std::string>(), {}};
      for (size_t i = 1; i < cell.size(); ++i) parsed.objects.push_back(cell.at(i).get<std::string>());
      obs.local_view.push_back(std::move(parsed));
    } else {
      obs.local_view.push_back(Cell{cell.get<std::string>(), {}});
    }
  }
  obs.inventory = j.at("inventory").get<std::map<std::string, int>>();
  obs.status = j.at("status").get<std::set<std::string>>();
  obs.seen_receptacles = j.at("seen_receptacles").get<std::vector<std::string>>();
  if (!j.at("target").is_null()) obs.target = j.at("target").get<std::string>();
  if (!j.at("holding").is_null()) obs.holding = j.at("holding").get<std::string>();
  return obs;
}

}  // namespace

std::string observation_to_json_text(const Observation& obs) {
  return observation_to_json(obs).dump();
}

Observation observation_from_json_text(const std::string& text) {
  return observation_from_json(json::parse(text));
}

std::string step_result_to_json_line(const StepResult& step) {
  json j{
      {"observation", observation_to_json(step.observation)},
      {"events", step.events},
      {"done", step.done},
      {"extrinsic_reward", step.extrinsic_reward},
  };
  if (step.action_outcome) {
    json outcome = json::array();
    outcome.push_back(step.action_outcome->verb);
    if (step.action_outcome->noun) outcome.push_back(*step.action_outcome->noun);
    j["action_outcome"] = std::move(outcome);
  } else {
    j["action_outcome"] = nullptr;
  }
  return j.dump();
}

StepResult step_result_from_json_line(const std::string& line) {
  const json j = json::parse(line);
  StepResult step;
  step.observation = observation_from_json(j.at("observation"));
  step.events = j.at("events").get<std::vector<std::string>>();
  step.done = j.at("done").get<bool>();
  step.extrinsic_reward = j.at("extrinsic_reward").get<double>();
  if (!j.at("action_outcome").is_null()) {
    const auto& outcome = j.at("action_outcome");
    ActionSpec spec;
    spec.verb = outcome.at(0).get<std::string>();
    if (outcome.size() > 1) spec.noun = outcome.at(1).get<std::string>();
    step.action_outcome = spec;
  }
  return step;
}

void write_trajectory(std::ostream& out, const std::vector<StepResult>& steps) {
  for (const auto& step : steps) {
    out << step_result_to_json_line(step) << '\n';
  }
}

std::vector<StepResult> read_trajectory(std::istream& in) {
  std::vector<StepResult> steps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    steps.push_back(step_result_from_json_line(line));
  }
  return steps;
}

}  // namespace ellm
