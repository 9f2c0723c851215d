#pragma once

#include <string>
#include <vector>

namespace commcp {

// Household object knowledge used by the simulated reasoning backend and the
// scenario synthesizer: which objects co-occur, which are generic house
// features, and which rooms an object plausibly lives in.

extern const char* kAffinityVersion;

// Symmetric relation over object names (~40 curated pairs).
bool affinity_related(const std::string& a, const std::string& b);

// Generic features (doors, windows, ...) that are never worth reporting.
bool is_common_feature(const std::string& name);

struct CatalogEntry {
  std::string name;
  std::vector<std::string> rooms;  // labels the object may be placed in
  bool colorable = false;
  bool stateful = false;  // supports on/off state questions
};

const std::vector<CatalogEntry>& object_catalog();
const std::vector<std::string>& color_palette();

}  // namespace commcp
