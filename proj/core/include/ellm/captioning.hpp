#pragma once

#include <map>
#include <string>
#include <vector>

#include "ellm/action.hpp"
#include "ellm/observation.hpp"
#include "ellm/rng.hpp"

namespace ellm {

// Deterministic templated captioners. Same observation, same text, no hidden
// state; every template is pinned byte-exactly by golden-file tests.

// "You see {list}. You are targeting {target}. You have in your inventory
// {list}." plus hungry/thirsty/sleepy clauses. Sentences with empty slots are
// omitted; the "You see" list follows the canonical cell-kind order.
std::string caption_state_crafter(const Observation& obs);

// Lowercase "verb noun" for a successful outcome, "" when the step had none.
std::string caption_transition_crafter(const std::optional<ActionSpec>& outcome);

// "You see {object} in/on {receptacle}." per visible object, then
// "You have seen: {receptacles}." and "You are holding {object}." if gripping.
std::string caption_state_housegrid(const Observation& obs);

// "pick {object}" or "place {object} in/on {receptacle}".
std::string caption_transition_housegrid(const std::optional<ActionSpec>& outcome);

// Reward-level error model for a learned transition captioner: each row maps
// a true outcome caption to independent emission probabilities per caption,
// plus an optional probability of emitting nothing at all.
struct CaptionConfusion {
  // row token -> (emitted caption -> probability); ordered for determinism.
  std::map<std::string, std::map<std::string, double>> rows;
  std::map<std::string, double> false_negative;

  static CaptionConfusion identity(const std::vector<std::string>& captions);
  static CaptionConfusion from_json_file(const std::string& path);
  std::string to_json() const;
};

// Emits each column caption of the row independently with its configured
// probability. Outcomes without a row fall back to emitting the truth
// unchanged. Deterministic given the rng state.
std::vector<std::string> inject_noise(const std::string& true_outcome,
                                      const CaptionConfusion& confusion, Rng& rng);

}  // namespace ellm
