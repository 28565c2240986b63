#include "ellm/action.hpp"

#include <algorithm>
#include <set>

#include "ellm/errors.hpp"

namespace ellm {

std::string ActionSpec::text() const {
  if (!noun) return verb;
  return verb + " " + *noun;
}

namespace {

void check_tokens(const std::vector<std::string>& tokens, const char* which) {
  std::set<std::string> seen;
  for (const auto& t : tokens) {
    if (t.empty()) {
      throw ConfigError(std::string("empty token in ") + which + " list");
    }
    if (!seen.insert(t).second) {
      throw ConfigError(std::string("duplicate token '") + t + "' in " + which + " list");
    }
  }
}

}  // namespace

std::vector<ActionSpec> enumerate_actions(const std::vector<std::string>& verbs,
                                          const std::vector<std::string>& nouns) {
  if (verbs.empty()) throw ConfigError("verb list must not be empty");
  check_tokens(verbs, "verb");
  check_tokens(nouns, "noun");

  std::vector<ActionSpec> actions;
  actions.reserve(verbs.size() * (nouns.size() + 1));
  for (const auto& verb : verbs) {
    actions.push_back(ActionSpec{verb, std::nullopt});
    for (const auto& noun : nouns) {
      actions.push_back(ActionSpec{verb, noun});
    }
  }
  return actions;
}

std::optional<ActionSpec> parse_action_text(const std::string& text,
                                            const std::vector<std::string>& verbs,
                                            const std::vector<std::string>& nouns) {
  // Longest verb first so "move left" wins over a hypothetical verb "move".
  const std::string* best_verb = nullptr;
  for (const auto& verb : verbs) {
    if (text == verb || (text.size() > verb.size() + 1 && text.compare(0, verb.size(), verb) == 0 &&
                         text[verb.size()] == ' ')) {
      if (!best_verb || verb.size() > best_verb->size()) best_verb = &verb;
    }
  }
  if (!best_verb) return std::nullopt;
  if (text.size() == best_verb->size()) return ActionSpec{*best_verb, std::nullopt};

  const std::string rest = text.substr(best_verb->size() + 1);
  if (std::find(nouns.begin(), nouns.end(), rest) == nouns.end()) return std::nullopt;
  return ActionSpec{*best_verb, rest};
}

}  // namespace ellm
