#include "ellm/features.hpp"

#include <algorithm>
#include <cmath>

#include "ellm/gridcraft.hpp"

namespace ellm {

int gridcraft_feature_dim() {
  const int kinds = static_cast<int>(gridcraft::cell_kinds().size());
  const int nouns = static_cast<int>(gridcraft::nouns().size());
  const int items = static_cast<int>(gridcraft::item_kinds().size());
  return kinds * 3 + (nouns + 1) + items + 4;
}

std::vector<float> gridcraft_features(const Observation& obs) {
  std::vector<float> features;
  features.reserve(static_cast<std::size_t>(gridcraft_feature_dim()));

  const int center_r = obs.view_rows / 2;
  const int center_c = obs.view_cols / 2;
  const float half_r = static_cast<float>(std::max(1, center_r));
  const float half_c = static_cast<float>(std::max(1, center_c));

  for (const auto& kind : gridcraft::cell_kinds()) {
    int best_dr = 0, best_dc = 0;
    int best_dist = 1 << 30;
    for (int r = 0; r < obs.view_rows; ++r) {
      for (int c = 0; c < obs.view_cols; ++c) {
        if (obs.at(r, c).kind != kind) continue;
        const int dr = r - center_r;
        const int dc = c - center_c;
        const int dist = std::abs(dr) + std::abs(dc);
        if (dist < best_dist) {
          best_dist = dist;
          best_dr = dr;
          best_dc = dc;
        }
      }
    }
    if (best_dist == (1 << 30)) {
      features.push_back(0.0f);
      features.push_back(0.0f);
      features.push_back(0.0f);
    } else {
      features.push_back(1.0f);
      features.push_back(static_cast<float>(best_dr) / half_r);
      features.push_back(static_cast<float>(best_dc) / half_c);
    }
  }

  for (const auto& noun : gridcraft::nouns()) {
    features.push_back(obs.target && *obs.target == noun ? 1.0f : 0.0f);
  }
  features.push_back(obs.target ? 0.0f : 1.0f);

  for (const auto& item : gridcraft::item_kinds()) {
    auto it = obs.inventory.find(item);
    const int count = it == obs.inventory.end() ? 0 : it->second;
    features.push_back(static_cast<float>(std::min(count, 9)) / 9.0f);
  }

  features.push_back(obs.status.count("hungry") ? 1.0f : 0.0f);
  features.push_back(obs.status.count("thirsty") ? 1.0f : 0.0f);
  features.push_back(obs.status.count("sleepy") ? 1.0f : 0.0f);
  features.push_back(obs.status.count("low health") ? 1.0f : 0.0f);
  return features;
}

int housegrid_feature_dim(const housegrid::RearrangementTask& task) {
  const int objects = static_cast<int>(task.objects.size());
  const int receptacles = static_cast<int>(task.receptacles.size());
  return objects * (4 + receptacles) + receptacles * 2 + 1;
}

std::vector<float> housegrid_features(const Observation& obs,
                                      const housegrid::RearrangementTask& task) {
  std::vector<float> features;
  features.reserve(static_cast<std::size_t>(housegrid_feature_dim(task)));

  const int center_r = obs.view_rows / 2;
  const int center_c = obs.view_cols / 2;
  const float radius = static_cast<float>(std::max(1, center_r));

  struct Found {
    bool seen = false;
    float dr = 0.0f;
    float dc = 0.0f;
    int receptacle = -1;
  };
  std::vector<Found> object_info(task.objects.size());
  std::vector<Found> receptacle_info(task.receptacles.size());

  for (int r = 0; r < obs.view_rows; ++r) {
    for (int c = 0; c < obs.view_cols; ++c) {
      const Cell& cell = obs.at(r, c);
      if (cell.kind.empty() || cell.kind == "floor" || cell.kind == "wall") continue;
      for (std::size_t i = 0; i < task.receptacles.size(); ++i) {
        if (task.receptacles[i] != cell.kind) continue;
        receptacle_info[i].seen = true;
        receptacle_info[i].dr = static_cast<float>(r - center_r) / radius;
        receptacle_info[i].dc = static_cast<float>(c - center_c) / radius;
        for (const auto& object : cell.objects) {
          for (std::size_t j = 0; j < task.objects.size(); ++j) {
            if (task.objects[j].name == object) {
              object_info[j].seen = true;
              object_info[j].dr = receptacle_info[i].dr;
              object_info[j].dc = receptacle_info[i].dc;
              object_info[j].receptacle = static_cast<int>(i);
            }
          }
        }
      }
    }
  }

  for (std::size_t j = 0; j < task.objects.size(); ++j) {
    const bool held = obs.holding && *obs.holding == task.objects[j].name;
    features.push_back(object_info[j].seen ? 1.0f : 0.0f);
    features.push_back(object_info[j].dr);
    features.push_back(object_info[j].dc);
    features.push_back(held ? 1.0f : 0.0f);
    for (std::size_t i = 0; i < task.receptacles.size(); ++i) {
      features.push_back(object_info[j].receptacle == static_cast<int>(i) ? 1.0f : 0.0f);
    }
  }
  for (std::size_t i = 0; i < task.receptacles.size(); ++i) {
    features.push_back(receptacle_info[i].dr);
    features.push_back(receptacle_info[i].dc);
  }
  features.push_back(obs.holding ? 1.0f : 0.0f);
  return features;
}

}  // namespace ellm
