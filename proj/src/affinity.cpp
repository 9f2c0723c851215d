#include "commcp/affinity.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace commcp {

const char* kAffinityVersion = "affinity-v1";

namespace {

// Curated co-occurrence pairs; order within a pair does not matter.
const std::array<std::pair<const char*, const char*>, 42> kPairs = {{
    {"pillow", "cushion"},
    {"pillow", "bear cushion"},
    {"cushion", "bear cushion"},
    {"pillow", "bed"},
    {"cushion", "sofa"},
    {"bear cushion", "bed"},
    {"bed", "wardrobe"},
    {"bed", "nightstand"},
    {"nightstand", "lamp"},
    {"bed", "lamp"},
    {"doll", "bed"},
    {"doll", "cushion"},
    {"wardrobe", "mirror"},
    {"towel", "bath mat"},
    {"towel", "sink"},
    {"bath mat", "bathtub"},
    {"toothbrush", "mirror"},
    {"toothbrush", "sink"},
    {"washing machine", "towel"},
    {"oven", "kettle"},
    {"oven", "frying pan"},
    {"kettle", "mug"},
    {"fridge", "sink"},
    {"fridge", "oven"},
    {"utensils", "napkins"},
    {"utensils", "dining table"},
    {"napkins", "dining table"},
    {"mug", "dining table"},
    {"frying pan", "sink"},
    {"tv", "sofa"},
    {"tv", "remote"},
    {"remote", "sofa"},
    {"coffee table", "sofa"},
    {"coffee table", "remote"},
    {"bookshelf", "plant"},
    {"bookshelf", "coffee table"},
    {"pool table", "cue"},
    {"pool table", "ball"},
    {"cue", "ball"},
    {"basketboard", "ball"},
    {"coat rack", "umbrella"},
    {"coat rack", "shoes"},
}};

const std::array<const char*, 5> kCommonFeatures = {
    "door", "wall", "window", "ceiling light", "light switch"};

}  // namespace

bool affinity_related(const std::string& a, const std::string& b) {
  for (const auto& [x, y] : kPairs) {
    if ((a == x && b == y) || (a == y && b == x)) return true;
  }
  return false;
}

bool is_common_feature(const std::string& name) {
  return std::find(kCommonFeatures.begin(), kCommonFeatures.end(), name) != kCommonFeatures.end();
}

const std::vector<CatalogEntry>& object_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"bed", {"bedroom"}, false, false},
      {"pillow", {"bedroom", "living_room"}, true, false},
      {"cushion", {"bedroom", "living_room"}, true, false},
      {"doll", {"bedroom"}, true, false},
      {"wardrobe", {"bedroom"}, false, false},
      {"nightstand", {"bedroom"}, false, false},
      {"lamp", {"bedroom", "living_room"}, false, true},
      {"towel", {"bathroom"}, true, false},
      {"bath mat", {"bathroom"}, true, false},
      {"bathtub", {"bathroom"}, false, false},
      {"toothbrush", {"bathroom"}, true, false},
      {"mirror", {"bathroom", "bedroom"}, false, false},
      {"washing machine", {"bathroom", "kitchen"}, false, true},
      {"sink", {"bathroom", "kitchen"}, false, false},
      {"oven", {"kitchen"}, false, true},
      {"fridge", {"kitchen"}, false, false},
      {"kettle", {"kitchen"}, false, true},
      {"mug", {"kitchen"}, true, false},
      {"frying pan", {"kitchen"}, false, false},
      {"utensils", {"kitchen"}, false, false},
      {"napkins", {"kitchen"}, true, false},
      {"dining table", {"kitchen", "living_room"}, false, false},
      {"tv", {"living_room"}, false, true},
      {"sofa", {"living_room"}, true, false},
      {"remote", {"living_room"}, false, false},
      {"coffee table", {"living_room"}, false, false},
      {"bookshelf", {"living_room"}, false, false},
      {"plant", {"living_room", "hallway"}, false, false},
      {"pool table", {"living_room"}, false, false},
      {"cue", {"living_room"}, false, false},
      {"ball", {"living_room", "bedroom"}, true, false},
      {"basketboard", {"living_room"}, false, false},
      {"coat rack", {"hallway"}, false, false},
      {"umbrella", {"hallway"}, true, false},
      {"shoes", {"hallway"}, true, false},
  };
  return catalog;
}

const std::vector<std::string>& color_palette() {
  static const std::vector<std::string> palette = {"red",  "blue",  "green", "white",
                                                   "black", "gray", "yellow"};
  return palette;
}

}  // namespace commcp
