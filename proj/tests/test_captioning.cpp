#include <doctest.h>

#include <fstream>
#include <map>

#include "ellm/captioning.hpp"
#include "ellm/errors.hpp"

using namespace ellm;

namespace {

Observation crafter_obs(std::vector<std::string> kinds, std::optional<std::string> target,
                        std::map<std::string, int> inventory, std::set<std::string> status = {}) {
  Observation obs;
  obs.view_rows = 1;
  obs.view_cols = static_cast<int>(kinds.size());
  for (auto& kind : kinds) obs.local_view.push_back(Cell{std::move(kind), {}});
  obs.target = std::move(target);
  obs.inventory = std::move(inventory);
  obs.status = std::move(status);
  return obs;
}

}  // namespace

TEST_CASE("crafter state caption matches the documented template byte for byte") {
  const Observation obs =
      crafter_obs({"water", "grass", "cow", "diamond"}, "grass", {{"plant", 1}});
  CHECK(caption_state_crafter(obs) ==
        "You see water, grass, cow, and diamond. You are targeting grass. "
        "You have in your inventory plant.");
}

TEST_CASE("crafter state caption orders kinds canonically, not by view position") {
  const Observation obs = crafter_obs({"diamond", "cow", "grass", "water"}, std::nullopt, {});
  CHECK(caption_state_crafter(obs) == "You see water, grass, cow, and diamond.");
}

TEST_CASE("crafter caption omits empty sentences and appends status clauses") {
  Observation obs = crafter_obs({"tree"}, std::nullopt, {});
  CHECK(caption_state_crafter(obs) == "You see tree.");

  obs.status = {"hungry"};
  CHECK(caption_state_crafter(obs) == "You see tree. You are hungry.");

  obs.status = {"hungry", "thirsty", "sleepy", "low health"};
  CHECK(caption_state_crafter(obs) ==
        "You see tree. You are hungry. You are thirsty. You are sleepy.");

  const Observation empty = crafter_obs({}, std::nullopt, {});
  CHECK(caption_state_crafter(empty).empty());
}

TEST_CASE("crafter inventory caption lists the item set without counts") {
  const Observation obs =
      crafter_obs({"grass"}, std::nullopt, {{"wood", 3}, {"plant", 1}, {"stone", 2}});
  CHECK(caption_state_crafter(obs) ==
        "You see grass. You have in your inventory wood, stone, and plant.");
}

TEST_CASE("crafter transition caption is the lowercase verb-noun pair") {
  CHECK(caption_transition_crafter(ActionSpec{"eat", "cow"}) == "eat cow");
  CHECK(caption_transition_crafter(ActionSpec{"place", "crafting table"}) ==
        "place crafting table");
  CHECK(caption_transition_crafter(ActionSpec{"sleep", std::nullopt}) == "sleep");
  CHECK(caption_transition_crafter(std::nullopt).empty());
}

TEST_CASE("housegrid state caption follows the in/on template") {
  Observation obs;
  obs.view_rows = 1;
  obs.view_cols = 2;
  obs.local_view.push_back(Cell{"table", {"vase"}});
  obs.local_view.push_back(Cell{"floor", {}});
  obs.seen_receptacles = {"table", "sink"};
  CHECK(caption_state_housegrid(obs) ==
        "You see vase in/on table. You have seen: table, sink.");

  obs.holding = "lamp";
  CHECK(caption_state_housegrid(obs) ==
        "You see vase in/on table. You have seen: table, sink. You are holding lamp.");

  obs.local_view[0].objects.clear();
  obs.holding.reset();
  CHECK(caption_state_housegrid(obs) == "You have seen: table, sink.");
}

TEST_CASE("housegrid transition captions") {
  CHECK(caption_transition_housegrid(ActionSpec{"pick", "lamp"}) == "pick lamp");
  CHECK(caption_transition_housegrid(ActionSpec{"place", "vase in/on shelf"}) ==
        "place vase in/on shelf");
  CHECK(caption_transition_housegrid(std::nullopt).empty());
}

TEST_CASE("identity confusion matrix reproduces the true caption") {
  const CaptionConfusion identity = CaptionConfusion::identity({"chop tree", "eat cow"});
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto emitted = inject_noise("chop tree", identity, rng);
    REQUIRE(emitted.size() == 1);
    CHECK(emitted[0] == "chop tree");
  }
}

TEST_CASE("unknown outcomes pass through unchanged") {
  const CaptionConfusion identity = CaptionConfusion::identity({"chop tree"});
  Rng rng(3);
  const auto emitted = inject_noise("mine diamond", identity, rng);
  REQUIRE(emitted.size() == 1);
  CHECK(emitted[0] == "mine diamond");
}

TEST_CASE("a zero self-probability row never emits its own caption") {
  CaptionConfusion confusion;
  confusion.rows["chop grass"]["chop grass"] = 0.0;
  confusion.rows["chop grass"]["chop tree"] = 0.35;
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    for (const auto& caption : inject_noise("chop grass", confusion, rng)) {
      CHECK(caption != "chop grass");
    }
  }
}

TEST_CASE("emission rates calibrate to the configured probabilities") {
  CaptionConfusion confusion;
  confusion.rows["chop tree"]["chop tree"] = 0.9;
  confusion.rows["chop tree"]["chop grass"] = 0.8;
  Rng rng(5);
  int tree = 0, grass = 0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    for (const auto& caption : inject_noise("chop tree", confusion, rng)) {
      if (caption == "chop tree") ++tree;
      if (caption == "chop grass") ++grass;
    }
  }
  CHECK(std::abs(static_cast<double>(tree) / samples - 0.9) < 0.02);
  CHECK(std::abs(static_cast<double>(grass) / samples - 0.8) < 0.02);
}

TEST_CASE("per-row false negative gate suppresses all emissions") {
  CaptionConfusion confusion;
  confusion.rows["chop tree"]["chop tree"] = 1.0;
  confusion.false_negative["chop tree"] = 1.0;
  Rng rng(9);
  CHECK(inject_noise("chop tree", confusion, rng).empty());
}

TEST_CASE("confusion matrix file round trip and validation") {
  const std::string path = std::string(ELLM_TEST_OUT_DIR) + "/confusion_roundtrip.json";
  CaptionConfusion confusion;
  confusion.rows["chop tree"]["chop tree"] = 0.9;
  confusion.false_negative["chop tree"] = 0.1;
  {
    std::ofstream out(path);
    out << confusion.to_json();
  }
  const CaptionConfusion loaded = CaptionConfusion::from_json_file(path);
  CHECK(loaded.rows == confusion.rows);
  CHECK(loaded.false_negative == confusion.false_negative);

  const CaptionConfusion shipped =
      CaptionConfusion::from_json_file(std::string(ELLM_DATA_DIR) + "/confusion_example.json");
  CHECK(shipped.rows.at("chop grass").at("chop grass") == 0.0);

  {
    std::ofstream out(path);
    out << R"({"version":1,"entries":[["a","b",1.5]]})";
  }
  CHECK_THROWS_AS(CaptionConfusion::from_json_file(path), ConfigError);
}
