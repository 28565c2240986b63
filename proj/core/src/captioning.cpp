#include "ellm/captioning.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ellm/errors.hpp"
#include "ellm/gridcraft.hpp"
#include "ellm/text.hpp"

namespace ellm {

using nlohmann::json;

namespace {

// Visible kinds deduplicated into canonical order.
std::vector<std::string> visible_kinds(const Observation& obs) {
  std::set<std::string> present;
  for (const auto& cell : obs.local_view) {
    if (!cell.kind.empty()) present.insert(cell.kind);
  }
  std::vector<std::string> ordered;
  for (const auto& kind : gridcraft::cell_kinds()) {
    if (present.count(kind)) ordered.push_back(kind);
  }
  return ordered;
}

std::vector<std::string> inventory_items(const Observation& obs) {
  std::vector<std::string> items;
  for (const auto& kind : gridcraft::item_kinds()) {
    auto it = obs.inventory.find(kind);
    if (it != obs.inventory.end() && it->second > 0) items.push_back(kind);
  }
  // Anything outside the canonical list still captions, after it.
  for (const auto& [item, count] : obs.inventory) {
    if (count > 0 &&
        std::find(items.begin(), items.end(), item) == items.end()) {
      items.push_back(item);
    }
  }
  return items;
}

}  // namespace

std::string caption_state_crafter(const Observation& obs) {
  std::vector<std::string> sentences;
  const auto seen = visible_kinds(obs);
  if (!seen.empty()) sentences.push_back("You see " + comma_list(seen) + ".");
  if (obs.target) sentences.push_back("You are targeting " + *obs.target + ".");
  const auto items = inventory_items(obs);
  if (!items.empty()) sentences.push_back("You have in your inventory " + comma_list(items) + ".");
  if (obs.status.count("hungry")) sentences.push_back("You are hungry.");
  if (obs.status.count("thirsty")) sentences.push_back("You are thirsty.");
  if (obs.status.count("sleepy")) sentences.push_back("You are sleepy.");
  return join(sentences, " ");
}

std::string caption_transition_crafter(const std::optional<ActionSpec>& outcome) {
  if (!outcome) return "";
  return outcome->text();
}

std::string caption_state_housegrid(const Observation& obs) {
  std::vector<std::string> sentences;
  for (const auto& cell : obs.local_view) {
    for (const auto& object : cell.objects) {
      sentences.push_back("You see " + object + " in/on " + cell.kind + ".");
    }
  }
  if (!obs.seen_receptacles.empty()) {
    sentences.push_back("You have seen: " + join(obs.seen_receptacles, ", ") + ".");
  }
  if (obs.holding) sentences.push_back("You are holding " + *obs.holding + ".");
  return join(sentences, " ");
}

std::string caption_transition_housegrid(const std::optional<ActionSpec>& outcome) {
  if (!outcome) return "";
  return outcome->text();
}

CaptionConfusion CaptionConfusion::identity(const std::vector<std::string>& captions) {
  CaptionConfusion confusion;
  for (const auto& caption : captions) {
    confusion.rows[caption][caption] = 1.0;
  }
  return confusion;
}

std::string CaptionConfusion::to_json() const {
  json entries = json::array();
  for (const auto& [row, columns] : rows) {
    for (const auto& [column, p] : columns) {
      entries.push_back(json::array({row, column, p}));
    }
  }
  return json{{"version", 1}, {"entries", entries}, {"false_negative", false_negative}}.dump(2);
}

CaptionConfusion CaptionConfusion::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open confusion matrix file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("bad confusion matrix " + path + ": " + ex.what());
  }
  CaptionConfusion confusion;
  for (const auto& entry : j.at("entries")) {
    const auto row = entry.at(0).get<std::string>();
    const auto column = entry.at(1).get<std::string>();
    const double p = entry.at(2).get<double>();
    if (p < 0.0 || p > 1.0) {
      throw ConfigError("confusion probability out of [0,1] for row '" + row + "'");
    }
    confusion.rows[row][column] = p;
  }
  if (j.contains("false_negative")) {
    confusion.false_negative = j.at("false_negative").get<std::map<std::string, double>>();
    for (const auto& [row, p] : confusion.false_negative) {
      if (p < 0.0 || p > 1.0) {
        throw ConfigError("false-negative probability out of [0,1] for row '" + row + "'");
      }
    }
  }
  return confusion;
}

std::vector<std::string> inject_noise(const std::string& true_outcome,
                                      const CaptionConfusion& confusion, Rng& rng) {
  auto row = confusion.rows.find(true_outcome);
  if (row == confusion.rows.end()) {
    return {true_outcome};  // identity fallback for unknown outcomes
  }
  auto fn = confusion.false_negative.find(true_outcome);
  if (fn != confusion.false_negative.end() && rng.next_bool(fn->second)) {
    return {};
  }
  std::vector<std::string> emitted;
  for (const auto& [caption, p] : row->second) {
    if (rng.next_bool(p)) emitted.push_back(caption);
  }
  return emitted;
}

}  // namespace ellm
