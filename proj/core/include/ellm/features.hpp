#pragma once

#include <vector>

#include "ellm/housegrid.hpp"
#include "ellm/observation.hpp"

namespace ellm {

// Symbolic feature encoders standing in for the pixel pipeline. Both are pure
// functions of the Observation.

// Per-kind presence and nearest-offset triples, faced-noun one-hot, inventory
// counts, status flags.
int gridcraft_feature_dim();
std::vector<float> gridcraft_features(const Observation& obs);

// Object visibility/offsets/holding/receptacle assignment plus receptacle
// offsets, in the rotated egocentric frame.
int housegrid_feature_dim(const housegrid::RearrangementTask& task);
std::vector<float> housegrid_features(const Observation& obs,
                                      const housegrid::RearrangementTask& task);

}  // namespace ellm
