#include "ellm/suggestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "ellm/captioning.hpp"
#include "ellm/errors.hpp"
#include "ellm/gridcraft.hpp"
#include "ellm/text.hpp"

namespace ellm {

using nlohmann::json;

std::string to_string(SuggestionSource source) {
  switch (source) {
    case SuggestionSource::open_ended_llm: return "open_ended_llm";
    case SuggestionSource::closed_form_llm: return "closed_form_llm";
    case SuggestionSource::scripted_oracle: return "scripted_oracle";
    case SuggestionSource::uniform: return "uniform";
    case SuggestionSource::novelty_sampler: return "novelty_sampler";
  }
  return "unknown";
}

SuggestionSet SuggestionSet::make(std::vector<std::string> raw_goals, SuggestionSource source,
                                  std::int64_t timestep, std::size_t max_goals) {
  SuggestionSet set;
  set.source = source;
  set.timestep = timestep;
  std::set<std::string> seen;
  for (auto& goal : raw_goals) {
    std::string normalized = to_lower(trim(goal));
    if (normalized.empty()) continue;
    if (!seen.insert(normalized).second) continue;
    set.goals.push_back(std::move(normalized));
    if (set.goals.size() >= max_goals) break;
  }
  return set;
}

std::string SuggestionSet::joined() const { return join(goals, ", "); }

SuggestionSet filter_achieved(const SuggestionSet& suggestions, const EpisodeLedger& ledger) {
  SuggestionSet filtered;
  filtered.source = suggestions.source;
  filtered.timestep = suggestions.timestep;
  for (const auto& goal : suggestions.goals) {
    if (!ledger.achieved(goal)) filtered.goals.push_back(goal);
  }
  return filtered;
}

// --- prompts ---

PromptTemplate PromptTemplate::crafter_default() {
  PromptTemplate t;
  t.preamble =
      "Valid actions: sleep, eat, attack, chop, drink, place, make, mine\n"
      "\n"
      "You are a player playing a game. Suggest the best actions the player can take based on "
      "the things you see and the items in your inventory. Only use valid actions and objects.\n"
      "\n";
  t.few_shot_examples =
      "You see plant, tree, and skeleton. You are targeting skeleton. What do you do?\n"
      "- Eat plant\n"
      "- Chop tree\n"
      "- Attack skeleton\n"
      "\n"
      "You see water, grass, cow, and diamond. You are targeting grass. You have in your "
      "inventory plant. What do you do?\n"
      "- Drink water\n"
      "- Chop grass\n"
      "- Attack cow\n"
      "- Place plant\n"
      "\n";
  t.query_suffix = " What do you do?\n";
  return t;
}

std::string PromptTemplate::to_json() const {
  return json{{"version", 1},
              {"preamble", preamble},
              {"few_shot_examples", few_shot_examples},
              {"query_suffix", query_suffix}}
      .dump(2);
}

PromptTemplate PromptTemplate::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prompt template: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("bad prompt template " + path + ": " + ex.what());
  }
  if (j.value("version", 0) != 1) throw ConfigError("unsupported prompt template version: " + path);
  PromptTemplate t;
  t.preamble = j.at("preamble").get<std::string>();
  t.few_shot_examples = j.at("few_shot_examples").get<std::string>();
  t.query_suffix = j.at("query_suffix").get<std::string>();
  return t;
}

std::string build_prompt_crafter(const std::string& state_caption, const PromptTemplate& tmpl) {
  return tmpl.preamble + tmpl.few_shot_examples + state_caption + tmpl.query_suffix;
}

std::string build_prompt_housegrid(const std::string& object, const std::string& receptacle) {
  return
      "You are a robot in a house. You have the ability to pick up objects and place them in "
      "new locations. For each example, state if the item should be stored in/on the "
      "receptacle.\n"
      "\n"
      "Should you store a dirty spoon in/on the chair: No.\n"
      "\n"
      "Should you store a mixing bowl in/on the dishwasher: Yes.\n"
      "\n"
      "Should you store a clean sock in/on the drawer: Yes.\n"
      "\n"
      "Should you store a " + object + " in/on the " + receptacle + ":";
}

std::vector<std::string> parse_open_ended(const std::string& completion) {
  std::vector<std::string> goals;
  for (const auto& line : split_lines(completion)) {
    if (line.rfind("- ", 0) != 0) break;
    std::string goal = to_lower(trim(line.substr(2)));
    if (!goal.empty()) goals.push_back(std::move(goal));
  }
  return goals;
}

bool closed_form_decide(double logprob_yes, double logprob_no) {
  if (!std::isfinite(logprob_yes) || !std::isfinite(logprob_no)) {
    throw std::invalid_argument("closed_form_decide: non-finite log-probability");
  }
  return logprob_yes > logprob_no;
}

bool decide_yes_no(const CompletionResponse& response) {
  double best_yes = -std::numeric_limits<double>::infinity();
  double best_no = -std::numeric_limits<double>::infinity();
  bool saw_yes = false, saw_no = false;
  for (const auto& [token, logprob] : response.first_token_logprobs) {
    const std::string normalized = to_lower(trim(token));
    if (normalized == "yes") {
      best_yes = std::max(best_yes, logprob);
      saw_yes = true;
    } else if (normalized == "no") {
      best_no = std::max(best_no, logprob);
      saw_no = true;
    }
  }
  if (saw_yes && saw_no) return closed_form_decide(best_yes, best_no);
  if (saw_yes != saw_no) return saw_yes;
  // No usable log-probabilities: string match on the leading completion text.
  return to_lower(trim(response.text)).rfind("yes", 0) == 0;
}

// --- suggestors ---

SuggestionSet CrafterOracleSuggestor::suggest(const Observation& obs, std::int64_t timestep) {
  std::vector<std::string> goals;
  for (const auto& goal : gridcraft::valid_goals()) {
    if (gridcraft::goal_context_holds(goal, obs)) goals.push_back(goal);
  }
  return SuggestionSet::make(std::move(goals), SuggestionSource::scripted_oracle, timestep,
                             max_goals_);
}

SuggestionSet UniformSuggestor::suggest(const Observation&, std::int64_t timestep) {
  std::vector<std::string> draws;
  draws.reserve(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    draws.push_back(goals_[rng_.next_below(goals_.size())]);
  }
  return SuggestionSet::make(std::move(draws), SuggestionSource::uniform, timestep, k_);
}

SuggestionSet NoveltySuggestor::suggest(const Observation&, std::int64_t timestep) {
  return SuggestionSet::make(goals_, SuggestionSource::novelty_sampler, timestep, SIZE_MAX);
}

CrafterLlmSuggestor::CrafterLlmSuggestor(LlmClient& client, std::string model, PromptTemplate tmpl,
                                         std::size_t max_goals)
    : client_(client), model_(std::move(model)), template_(std::move(tmpl)), max_goals_(max_goals) {}

SuggestionSet CrafterLlmSuggestor::suggest(const Observation& obs, std::int64_t timestep) {
  CompletionRequest request;
  request.model = model_;
  request.prompt = build_prompt_crafter(caption_state_crafter(obs), template_);
  const CompletionResponse response = client_.complete(request);
  return SuggestionSet::make(parse_open_ended(response.text), SuggestionSource::open_ended_llm,
                             timestep, max_goals_);
}

HousegridPairSuggestor::HousegridPairSuggestor(housegrid::RearrangementTask task,
                                               SuggestionSource source)
    : task_(std::move(task)), source_(source) {}

SuggestionSet HousegridPairSuggestor::suggest(const Observation& obs, std::int64_t timestep) {
  std::vector<std::string> goals;
  if (obs.holding) {
    for (const auto& receptacle : task_.receptacles) {
      if (accepted(*obs.holding, receptacle)) {
        goals.push_back("place " + *obs.holding + " in/on " + receptacle);
      }
    }
  } else {
    // Suggest picking each visible object that is not already in an accepted
    // receptacle.
    for (const auto& cell : obs.local_view) {
      for (const auto& object : cell.objects) {
        if (!accepted(object, cell.kind)) goals.push_back("pick " + object);
      }
    }
  }
  return SuggestionSet::make(std::move(goals), source_, timestep, SIZE_MAX);
}

HousegridScriptedSuggestor::HousegridScriptedSuggestor(housegrid::RearrangementTask task,
                                                       double match_accuracy,
                                                       double mismatch_accuracy, std::uint64_t seed)
    : HousegridPairSuggestor(std::move(task), SuggestionSource::scripted_oracle) {
  // Deterministically pick which true pairs to drop and which false pairs to
  // wrongly accept, matching the requested accuracies as closely as counts
  // allow.
  std::vector<std::pair<std::string, std::string>> true_pairs;
  std::vector<std::pair<std::string, std::string>> false_pairs;
  for (const auto& object : this->task().objects) {
    for (const auto& receptacle : this->task().receptacles) {
      const bool truth = std::find(object.correct.begin(), object.correct.end(), receptacle) !=
                         object.correct.end();
      (truth ? true_pairs : false_pairs).emplace_back(object.name, receptacle);
    }
  }
  Rng rng(seed, "suggestor-accuracy");
  auto flip_some = [&](std::vector<std::pair<std::string, std::string>>& pairs, double accuracy) {
    const auto flips =
        static_cast<std::size_t>(std::lround((1.0 - accuracy) * static_cast<double>(pairs.size())));
    std::shuffle(pairs.begin(), pairs.end(), rng.engine());
    for (std::size_t i = 0; i < flips && i < pairs.size(); ++i) flipped_.push_back(pairs[i]);
  };
  flip_some(true_pairs, match_accuracy);
  flip_some(false_pairs, mismatch_accuracy);
}

bool HousegridScriptedSuggestor::accepted(const std::string& object,
                                          const std::string& receptacle) {
  const housegrid::TaskObject* task_object = task().object(object);
  if (!task_object) return false;
  bool truth = std::find(task_object->correct.begin(), task_object->correct.end(), receptacle) !=
               task_object->correct.end();
  for (const auto& [fo, fr] : flipped_) {
    if (fo == object && fr == receptacle) return !truth;
  }
  return truth;
}

HousegridLlmSuggestor::HousegridLlmSuggestor(housegrid::RearrangementTask task, LlmClient& client,
                                             std::string model)
    : HousegridPairSuggestor(std::move(task), SuggestionSource::closed_form_llm),
      client_(client),
      model_(std::move(model)) {}

bool HousegridLlmSuggestor::accepted(const std::string& object, const std::string& receptacle) {
  CompletionRequest request;
  request.model = model_;
  request.prompt = build_prompt_housegrid(object, receptacle);
  request.max_tokens = 2;
  return decide_yes_no(client_.complete(request));
}

}  // namespace ellm
