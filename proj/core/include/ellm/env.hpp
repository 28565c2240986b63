#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ellm/action.hpp"
#include "ellm/observation.hpp"

namespace ellm {

// Episode lifecycle shared by both environments. A single instance is
// single-threaded; run one instance per thread for parallel rollouts.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const std::vector<ActionSpec>& actions() const = 0;
  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepResult step(const ActionSpec& action) = 0;
  virtual const EpisodeLedger& ledger() const = 0;
  virtual EpisodeLedger& ledger() = 0;

  // Index into actions() for a given spec; programming error if absent.
  int action_index(const ActionSpec& action) const;
};

// JSON-lines trajectory recording, one StepResult per line. Replaying a
// recorded (seed, action sequence) must reproduce the identical byte stream.
std::string step_result_to_json_line(const StepResult& step);
StepResult step_result_from_json_line(const std::string& line);

std::string observation_to_json_text(const Observation& obs);
Observation observation_from_json_text(const std::string& text);

void write_trajectory(std::ostream& out, const std::vector<StepResult>& steps);
std::vector<StepResult> read_trajectory(std::istream& in);

}  // namespace ellm
