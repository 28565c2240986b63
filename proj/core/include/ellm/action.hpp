#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ellm {

// A verb with an optional noun argument. "chop" + "tree" is an action, so is
// bare "sleep". Nonsensical pairings ("drink tree") are legal to attempt and
// resolve as no-ops inside the environments.
struct ActionSpec {
  std::string verb;
  std::optional<std::string> noun;

  // Lowercase "verb" or "verb noun" string, identical to the transition
  // caption of a successful outcome.
  std::string text() const;

  bool operator==(const ActionSpec& other) const = default;
};

// Every verb paired with the absent noun first, then with each noun in list
// order. Size is |verbs| * (|nouns| + 1). Duplicate tokens or empty verbs are
// a configuration error; an empty noun list is allowed and yields |verbs|
// bare-verb actions.
std::vector<ActionSpec> enumerate_actions(const std::vector<std::string>& verbs,
                                          const std::vector<std::string>& nouns);

// Parses "verb noun" text back into an ActionSpec against the given vocab,
// using longest-verb-prefix matching so multi-word verbs ("move left") and
// nouns ("crafting table") round-trip. Returns nullopt for anything outside
// the vocabulary.
std::optional<ActionSpec> parse_action_text(const std::string& text,
                                            const std::vector<std::string>& verbs,
                                            const std::vector<std::string>& nouns);

}  // namespace ellm
