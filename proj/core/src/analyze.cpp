#include "ellm/analyze.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "ellm/action.hpp"
#include "ellm/env.hpp"
#include "ellm/errors.hpp"
#include "ellm/gridcraft.hpp"

namespace ellm {

using nlohmann::json;

std::string to_string(SuggestionCategory category) {
  switch (category) {
    case SuggestionCategory::good: return "good";
    case SuggestionCategory::context_insensitive: return "context_insensitive";
    case SuggestionCategory::common_sense_insensitive: return "common_sense_insensitive";
    case SuggestionCategory::impossible: return "impossible";
  }
  return "unknown";
}

SuggestionCategory classify_suggestion(const std::string& goal, const Observation& context) {
  const auto parsed = parse_action_text(goal, gridcraft::verbs(), gridcraft::nouns());
  if (!parsed) return SuggestionCategory::impossible;
  if (!gridcraft::combo_effective(parsed->verb, parsed->noun)) {
    return SuggestionCategory::common_sense_insensitive;
  }
  return gridcraft::goal_context_holds(goal, context) ? SuggestionCategory::good
                                                      : SuggestionCategory::context_insensitive;
}

SuggestionAnalysis analyze_suggestions(const std::vector<SuggestionEvent>& suggested,
                                       const std::vector<RewardEvent>& rewarded) {
  SuggestionAnalysis analysis;
  std::array<std::int64_t, 4> suggested_counts{};
  for (const auto& event : suggested) {
    for (const auto& goal : event.goals) {
      suggested_counts[static_cast<std::size_t>(classify_suggestion(goal, event.context))] += 1;
      analysis.suggested_count += 1;
    }
  }
  std::array<std::int64_t, 4> rewarded_counts{};
  for (const auto& event : rewarded) {
    if (event.reward <= 0.0 || event.matched_goal.empty()) continue;
    rewarded_counts[static_cast<std::size_t>(
        classify_suggestion(event.matched_goal, event.context))] += 1;
    analysis.rewarded_count += 1;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    analysis.suggested_fractions[i] =
        analysis.suggested_count == 0
            ? 0.0
            : static_cast<double>(suggested_counts[i]) / static_cast<double>(analysis.suggested_count);
    analysis.rewarded_fractions[i] =
        analysis.rewarded_count == 0
            ? 0.0
            : static_cast<double>(rewarded_counts[i]) / static_cast<double>(analysis.rewarded_count);
  }
  return analysis;
}

SuggestionAnalysis analyze_suggestion_files(const std::string& suggestions_jsonl,
                                            const std::string& events_jsonl) {
  std::vector<SuggestionEvent> suggested;
  {
    std::ifstream in(suggestions_jsonl);
    if (!in) throw ConfigError("cannot open suggestion transcript: " + suggestions_jsonl);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      SuggestionEvent event;
      event.t = j.value("t", 0);
      event.episode = j.value("episode", 0);
      event.source = j.value("source", "");
      event.goals = j.at("goals").get<std::vector<std::string>>();
      event.context = observation_from_json_text(j.at("context").dump());
      suggested.push_back(std::move(event));
    }
  }
  std::vector<RewardEvent> rewarded;
  {
    std::ifstream in(events_jsonl);
    if (!in) throw ConfigError("cannot open event log: " + events_jsonl);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (j.value("type", "") != "reward") continue;
      RewardEvent event;
      event.t = j.value("t", 0);
      event.episode = j.value("episode", 0);
      event.matched_goal = j.value("matched_goal", "");
      event.reward = j.value("reward", 0.0);
      event.context = observation_from_json_text(j.at("context").dump());
      rewarded.push_back(std::move(event));
    }
  }
  return analyze_suggestions(suggested, rewarded);
}

std::string analysis_to_table(const SuggestionAnalysis& analysis) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-26s %10s %10s\n", "category", "suggested", "rewarded");
  out += line;
  for (std::size_t i = 0; i < 4; ++i) {
    std::snprintf(line, sizeof(line), "%-26s %9.1f%% %9.1f%%\n",
                  to_string(static_cast<SuggestionCategory>(i)).c_str(),
                  100.0 * analysis.suggested_fractions[i], 100.0 * analysis.rewarded_fractions[i]);
    out += line;
  }
  std::snprintf(line, sizeof(line), "n suggested=%lld, n rewarded=%lld\n",
                static_cast<long long>(analysis.suggested_count),
                static_cast<long long>(analysis.rewarded_count));
  out += line;
  return out;
}

}  // namespace ellm
