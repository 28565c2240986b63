#include <doctest.h>

#include "ellm/action.hpp"
#include "ellm/errors.hpp"
#include "ellm/gridcraft.hpp"
#include "ellm/rng.hpp"

using namespace ellm;

TEST_CASE("crafter action space enumerates exactly 260 actions") {
  const auto actions = enumerate_actions(gridcraft::verbs(), gridcraft::nouns());
  CHECK(gridcraft::verbs().size() == 13);
  CHECK(gridcraft::nouns().size() == 19);
  CHECK(actions.size() == 260);

  // Verb-major order, noun-absent first.
  CHECK(actions[0].text() == "do nothing");
  CHECK(actions[1].text() == "do nothing zombie");
  CHECK(actions[20].text() == "move left");
}

TEST_CASE("enumerate_actions small cases") {
  const auto actions = enumerate_actions({"a", "b"}, {"x", "y", "z"});
  CHECK(actions.size() == 8);

  // An empty noun list yields bare-verb actions only.
  const auto bare = enumerate_actions({"jump"}, {});
  REQUIRE(bare.size() == 1);
  CHECK(bare[0].text() == "jump");
}

TEST_CASE("enumerate_actions rejects duplicates and empty verbs") {
  CHECK_THROWS_AS(enumerate_actions({"a", "a"}, {"x"}), ConfigError);
  CHECK_THROWS_AS(enumerate_actions({"a"}, {"x", "x"}), ConfigError);
  CHECK_THROWS_AS(enumerate_actions({}, {"x"}), ConfigError);
  CHECK_THROWS_AS(enumerate_actions({""}, {"x"}), ConfigError);
}

TEST_CASE("enumerate_actions count formula holds for random sizes") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int num_verbs = 1 + static_cast<int>(rng.next_below(12));
    const int num_nouns = static_cast<int>(rng.next_below(15));
    std::vector<std::string> verbs, nouns;
    for (int i = 0; i < num_verbs; ++i) verbs.push_back("v" + std::to_string(i));
    for (int i = 0; i < num_nouns; ++i) nouns.push_back("n" + std::to_string(i));
    const auto actions = enumerate_actions(verbs, nouns);
    CHECK(actions.size() == static_cast<std::size_t>(num_verbs) * (num_nouns + 1));
  }
}

TEST_CASE("action text round-trips through parse for the whole crafter space") {
  const auto actions = enumerate_actions(gridcraft::verbs(), gridcraft::nouns());
  for (const auto& action : actions) {
    const auto parsed = parse_action_text(action.text(), gridcraft::verbs(), gridcraft::nouns());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == action);
  }
}

TEST_CASE("parse_action_text rejects text outside the vocabulary") {
  CHECK_FALSE(parse_action_text("make path", gridcraft::verbs(), gridcraft::nouns()).has_value());
  CHECK_FALSE(parse_action_text("make wood", gridcraft::verbs(), gridcraft::nouns()).has_value());
  CHECK_FALSE(parse_action_text("place lava", gridcraft::verbs(), gridcraft::nouns()).has_value());
  CHECK_FALSE(parse_action_text("build a house", gridcraft::verbs(), gridcraft::nouns()).has_value());
  CHECK_FALSE(parse_action_text("", gridcraft::verbs(), gridcraft::nouns()).has_value());

  // Multi-word nouns parse with the longest-verb-prefix rule.
  const auto parsed =
      parse_action_text("make wood pickaxe", gridcraft::verbs(), gridcraft::nouns());
  REQUIRE(parsed.has_value());
  CHECK(parsed->verb == "make");
  CHECK(*parsed->noun == "wood pickaxe");
}
