#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ellm/housegrid.hpp"
#include "ellm/llm_client.hpp"
#include "ellm/observation.hpp"
#include "ellm/rng.hpp"

namespace ellm {

enum class SuggestionSource {
  open_ended_llm,
  closed_form_llm,
  scripted_oracle,
  uniform,
  novelty_sampler,
};

std::string to_string(SuggestionSource source);

// The k goal strings active at a timestep. Goals are lowercase, deduplicated
// and non-empty; construction truncates to the configured maximum.
struct SuggestionSet {
  std::vector<std::string> goals;
  SuggestionSource source = SuggestionSource::scripted_oracle;
  std::int64_t timestep = 0;

  static SuggestionSet make(std::vector<std::string> raw_goals, SuggestionSource source,
                            std::int64_t timestep, std::size_t max_goals);

  bool empty() const { return goals.empty(); }
  // Goals joined as a single text sequence for goal-conditioned policies.
  std::string joined() const;
};

// Order-preserving removal of goals already achieved this episode.
SuggestionSet filter_achieved(const SuggestionSet& suggestions, const EpisodeLedger& ledger);

// --- prompts ---

struct PromptTemplate {
  std::string preamble;
  std::string few_shot_examples;
  std::string query_suffix;

  static PromptTemplate crafter_default();
  static PromptTemplate from_json_file(const std::string& path);
  std::string to_json() const;
};

// preamble + few-shot examples + current caption + " What do you do?".
std::string build_prompt_crafter(const std::string& state_caption, const PromptTemplate& tmpl);

// Fixed preamble, three verbatim examples, then
// "Should you store a {object} in/on the {receptacle}:".
std::string build_prompt_housegrid(const std::string& object, const std::string& receptacle);

// Keeps "- " list lines from the top of the completion, stopping at the first
// non-matching line; markers stripped, trimmed, lowercased.
std::vector<std::string> parse_open_ended(const std::string& completion);

// Accept iff log P(Yes) > log P(No); ties reject; non-finite inputs are a
// programming error.
bool closed_form_decide(double logprob_yes, double logprob_no);

// Yes/no from a completion response: first-token log-probabilities when the
// provider returns them, otherwise a string match on the leading text.
bool decide_yes_no(const CompletionResponse& response);

// --- suggestors ---

class Suggestor {
 public:
  virtual ~Suggestor() = default;
  virtual SuggestionSet suggest(const Observation& obs, std::int64_t timestep) = 0;
  virtual SuggestionSource source() const = 0;
};

// All gridcraft goals whose context preconditions currently hold, from the
// valid-goal list. No common-sense violations by construction.
class CrafterOracleSuggestor final : public Suggestor {
 public:
  explicit CrafterOracleSuggestor(std::size_t max_goals = SIZE_MAX) : max_goals_(max_goals) {}
  SuggestionSet suggest(const Observation& obs, std::int64_t timestep) override;
  SuggestionSource source() const override { return SuggestionSource::scripted_oracle; }

 private:
  std::size_t max_goals_;
};

// k iid uniform draws from the expressible goal strings each timestep.
class UniformSuggestor final : public Suggestor {
 public:
  UniformSuggestor(std::vector<std::string> expressible_goals, std::size_t k, Rng rng)
      : goals_(std::move(expressible_goals)), k_(k), rng_(std::move(rng)) {}
  SuggestionSet suggest(const Observation& obs, std::int64_t timestep) override;
  SuggestionSource source() const override { return SuggestionSource::uniform; }

 private:
  std::vector<std::string> goals_;
  std::size_t k_;
  Rng rng_;
};

// Every expressible goal; combined with the novelty filter this rewards each
// goal (including nonsensical ones performed in context) once per episode.
class NoveltySuggestor final : public Suggestor {
 public:
  explicit NoveltySuggestor(std::vector<std::string> expressible_goals)
      : goals_(std::move(expressible_goals)) {}
  SuggestionSet suggest(const Observation& obs, std::int64_t timestep) override;
  SuggestionSource source() const override { return SuggestionSource::novelty_sampler; }

 private:
  std::vector<std::string> goals_;
};

// Open-ended completion suggestor for gridcraft: captions the state, prompts
// the model, parses the "- " list.
class CrafterLlmSuggestor final : public Suggestor {
 public:
  CrafterLlmSuggestor(LlmClient& client, std::string model, PromptTemplate tmpl,
                      std::size_t max_goals);
  SuggestionSet suggest(const Observation& obs, std::int64_t timestep) override;
  SuggestionSource source() const override { return SuggestionSource::open_ended_llm; }

 private:
  LlmClient& client_;
  std::string model_;
  PromptTemplate template_;
  std::size_t max_goals_;
};

// Closed-form housegrid suggestor over an accepted (object, receptacle) set:
// "pick X" while X sits outside every accepted receptacle, and
// "place X in/on R" for accepted R while holding X.
class HousegridPairSuggestor : public Suggestor {
 public:
  HousegridPairSuggestor(housegrid::RearrangementTask task, SuggestionSource source);
  SuggestionSet suggest(const Observation& obs, std::int64_t timestep) override;
  SuggestionSource source() const override { return source_; }

 protected:
  virtual bool accepted(const std::string& object, const std::string& receptacle) = 0;
  const housegrid::RearrangementTask& task() const { return task_; }

 private:
  housegrid::RearrangementTask task_;
  SuggestionSource source_;
};

// Ground-truth-aligned stand-in for the closed-form model. match_accuracy is
// the fraction of true pairs accepted, mismatch_accuracy the fraction of
// false pairs rejected; degraded pairs are chosen deterministically per seed.
class HousegridScriptedSuggestor final : public HousegridPairSuggestor {
 public:
  HousegridScriptedSuggestor(housegrid::RearrangementTask task, double match_accuracy,
                             double mismatch_accuracy, std::uint64_t seed);

  bool pair_accepted(const std::string& object, const std::string& receptacle) {
    return accepted(object, receptacle);
  }

 protected:
  bool accepted(const std::string& object, const std::string& receptacle) override;

 private:
  std::vector<std::pair<std::string, std::string>> flipped_;
};

// Closed-form suggestor asking the model one yes/no question per pair.
class HousegridLlmSuggestor final : public HousegridPairSuggestor {
 public:
  HousegridLlmSuggestor(housegrid::RearrangementTask task, LlmClient& client, std::string model);

 protected:
  bool accepted(const std::string& object, const std::string& receptacle) override;

 private:
  LlmClient& client_;
  std::string model_;
};

}  // namespace ellm
