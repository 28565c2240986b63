#pragma once

#include <array>
#include <string>
#include <vector>

#include "ellm/harness.hpp"
#include "ellm/observation.hpp"

namespace ellm {

// Category of a suggested goal against the gridcraft action space and the
// context it was suggested in:
//   good                     - effective combo whose preconditions hold now
//   context_insensitive      - effective combo, preconditions unmet now
//   common_sense_insensitive - parseable combo that is a permanent no-op
//   impossible               - does not parse into any verb+noun of the space
enum class SuggestionCategory {
  good = 0,
  context_insensitive = 1,
  common_sense_insensitive = 2,
  impossible = 3,
};

std::string to_string(SuggestionCategory category);

SuggestionCategory classify_suggestion(const std::string& goal, const Observation& context);

struct SuggestionAnalysis {
  std::array<double, 4> suggested_fractions{};  // indexed by SuggestionCategory
  std::array<double, 4> rewarded_fractions{};
  std::int64_t suggested_count = 0;
  std::int64_t rewarded_count = 0;
};

// Fractions of suggested goal instances per category, and of rewarded goal
// instances classified in the context that was active when the reward fired.
SuggestionAnalysis analyze_suggestions(const std::vector<SuggestionEvent>& suggested,
                                       const std::vector<RewardEvent>& rewarded);

// Same, reading a run directory's suggestions.jsonl / events.jsonl.
SuggestionAnalysis analyze_suggestion_files(const std::string& suggestions_jsonl,
                                            const std::string& events_jsonl);

std::string analysis_to_table(const SuggestionAnalysis& analysis);

}  // namespace ellm
