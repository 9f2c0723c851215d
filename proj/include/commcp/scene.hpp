#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commcp/errors.hpp"

namespace commcp {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

enum class Heading { North, East, South, West };

const char* heading_name(Heading h);
std::optional<Heading> heading_from_name(const std::string& s);
Cell heading_delta(Heading h);  // grid y grows southward

struct Pose {
  Cell position;
  Heading heading = Heading::North;
};

enum class CellKind : std::uint8_t { Free, Wall };

// Closed room category set; scenario validation rejects anything else.
extern const std::vector<std::string> kRoomLabels;

struct Room {
  std::string id;
  std::string label;
  std::vector<Cell> cells;  // sorted row-major
};

// Object reference by name plus a required attribute subset.
struct Descriptor {
  std::string name;
  std::map<std::string, std::string> attributes;
  auto operator<=>(const Descriptor&) const = default;
};

struct ObjectInstance {
  std::string id;
  std::string name;
  std::map<std::string, std::string> attributes;  // keys: color, state, count, location_hint
  Cell position;
  std::string room_id;
};

bool matches(const ObjectInstance& obj, const Descriptor& d);
std::string descriptor_text(const Descriptor& d);
std::string descriptor_list_text(const std::vector<Descriptor>& ds);

class GridScene {
 public:
  std::string name;
  double cell_size = 1.0;  // meters per cell
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::vector<CellKind> cells;  // row-major
  std::vector<Room> rooms;
  std::vector<ObjectInstance> objects;

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  CellKind at(Cell c) const { return cells[static_cast<std::size_t>(c.y) * width + c.x]; }
  bool is_free(Cell c) const { return in_bounds(c) && at(c) == CellKind::Free; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width + c.x; }

  double area_m2() const { return width * height * cell_size * cell_size; }

  // -1 when the cell is a wall; otherwise index into rooms.
  int room_index_at(Cell c) const { return room_of_cell_[index(c)]; }
  const Room* room_at(Cell c) const {
    int r = room_index_at(c);
    return r < 0 ? nullptr : &rooms[r];
  }
  bool rooms_adjacent(int a, int b) const {
    return room_adj_[static_cast<std::size_t>(a) * rooms.size() + b];
  }

  std::vector<const ObjectInstance*> matching_objects(const Descriptor& d) const;
  const ObjectInstance* object_by_id(const std::string& id) const;

  // Called by the loader after all fields are populated. Throws
  // ValidationError naming the first violated invariant.
  void finalize();

 private:
  std::vector<int> room_of_cell_;
  std::vector<char> room_adj_;
};

struct Observation {
  Pose pose;
  std::vector<ObjectInstance> visible_objects;  // value snapshots
  std::vector<Cell> revealed_cells;             // sorted row-major
};

// True when `to` is revealed from `from`: no wall cell strictly between them
// on the supercover line. The target cell itself may be a wall.
bool line_of_sight(const GridScene& scene, Cell from, Cell to);

// All cells the segment from the center of `a` to the center of `b` touches,
// endpoints included; corner crossings include both side cells.
std::vector<Cell> supercover_line(Cell a, Cell b);

std::vector<ObjectInstance> visible_objects(const GridScene& scene, const Pose& pose,
                                            double fov_deg, int range);
std::vector<Cell> reveal(const GridScene& scene, const Pose& pose, double fov_deg, int range);
Observation observe(const GridScene& scene, const Pose& pose, double fov_deg, int range);

}  // namespace commcp
