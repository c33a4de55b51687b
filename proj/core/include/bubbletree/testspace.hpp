#pragma once

#include <vector>

#include "bubbletree/energy.hpp"
#include "bubbletree/model.hpp"

namespace bubbletree {

struct TestSpaceOptions {
  int level = 1;  // 0, 1, 2: nested refinement of the bump family
  bool include_tangent_basis = true;
};

// Tangent-projected sample of one model variation direction.
Field direction_field(const VariationDirection& dir, const Field& z_field);

// Tangent fields along the model map: the model-manifold directions followed
// by localized annular bumps times low Fourier modes. The tangent directions
// come first, so callers can treat them as the near-kernel block.
struct TestSpace {
  std::vector<Field> fields;
  int tangent_count = 0;  // leading entries sampled from tangent directions
};

TestSpace build_test_space(const SingularityModel& model, const Field& z_field,
                           const std::vector<VariationDirection>& basis,
                           const TestSpaceOptions& options);

}  // namespace bubbletree
