#pragma once

#include <cstdint>

#include "commcp/scenario.hpp"

namespace commcp {

struct GenConfig {
  std::uint64_t seed = 0;
  int size_class = 1;  // 1: area < 150 m2, 2: < 250 m2, 3: >= 250 m2
  int n_agents = 2;
  int n_questions = 6;
};

// Seeded synthesizer: BSP room layout with doorways, catalog-driven object
// placement, and one question of each style with verified ground truth. The
// result always passes load_scenario validation.
Scenario generate_scenario(const GenConfig& cfg);

}  // namespace commcp
