#pragma once

#include <string>
#include <utility>
#include <vector>

#include "commcp/scene.hpp"
#include "commcp/tasks.hpp"

namespace commcp {

struct Scenario {
  GridScene scene;
  QuestionSet questions;
  // Optional fixed start poses (one per agent). When absent, the episode
  // runner draws distinct free cells from its seed.
  std::vector<Pose> starts;
};

// Scenario document: a JSON key-value tree with sections
//   meta     {name, cell_size_m, seed}
//   grid     rows of characters, '#'=wall, '.'=free hallway, letters=room tags
//   rooms    [{id, label, tag}]
//   objects  [{id, name, room, pos:[x,y], attributes:{...}}]
//   questions[{id, type, text, choices, truth, targets, assignee}]
//   starts   optional [[x,y,heading], ...]
// Throws ParseError for malformed documents and ValidationError (naming the
// first violated invariant) for semantically invalid ones.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Semantic round-trip partner of load_scenario (bit-exactness not promised).
std::string serialize_scenario(const Scenario& s);

}  // namespace commcp
