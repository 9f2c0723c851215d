#include "commcp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace commcp {

const std::vector<std::string> kRoomLabels = {"bedroom",     "bathroom", "kitchen",
                                              "living_room", "hallway",  "other"};

const char* heading_name(Heading h) {
  switch (h) {
    case Heading::North: return "N";
    case Heading::East: return "E";
    case Heading::South: return "S";
    case Heading::West: return "W";
  }
  return "?";
}

std::optional<Heading> heading_from_name(const std::string& s) {
  if (s == "N") return Heading::North;
  if (s == "E") return Heading::East;
  if (s == "S") return Heading::South;
  if (s == "W") return Heading::West;
  return std::nullopt;
}

Cell heading_delta(Heading h) {
  switch (h) {
    case Heading::North: return {0, -1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, 1};
    case Heading::West: return {-1, 0};
  }
  return {0, 0};
}

bool matches(const ObjectInstance& obj, const Descriptor& d) {
  if (obj.name != d.name) return false;
  for (const auto& [k, v] : d.attributes) {
    auto it = obj.attributes.find(k);
    if (it == obj.attributes.end() || it->second != v) return false;
  }
  return true;
}

std::string descriptor_text(const Descriptor& d) {
  std::string out;
  auto color = d.attributes.find("color");
  if (color != d.attributes.end()) out += color->second + " ";
  out += d.name;
  auto state = d.attributes.find("state");
  if (state != d.attributes.end()) out += " that is " + state->second;
  auto hint = d.attributes.find("location_hint");
  if (hint != d.attributes.end()) out += " " + hint->second;
  return out;
}

std::string descriptor_list_text(const std::vector<Descriptor>& ds) {
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i > 0) out += ", ";
    out += descriptor_text(ds[i]);
  }
  return out;
}

std::vector<const ObjectInstance*> GridScene::matching_objects(const Descriptor& d) const {
  std::vector<const ObjectInstance*> out;
  for (const auto& obj : objects) {
    if (matches(obj, d)) out.push_back(&obj);
  }
  return out;
}

const ObjectInstance* GridScene::object_by_id(const std::string& id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

void GridScene::finalize() {
  if (width < 1 || height < 1) throw ValidationError("grid dimensions must be at least 1x1");
  if (cell_size <= 0.0) throw ValidationError("cell_size must be positive");
  if (cells.size() != static_cast<std::size_t>(width) * height)
    throw ValidationError("grid cell count does not match dimensions");

  room_of_cell_.assign(cells.size(), -1);
  std::set<std::string> room_ids;
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    const Room& room = rooms[r];
    if (!room_ids.insert(room.id).second)
      throw ValidationError("duplicate room id: " + room.id);
    if (std::find(kRoomLabels.begin(), kRoomLabels.end(), room.label) == kRoomLabels.end())
      throw ValidationError("unknown room label: " + room.label);
    if (room.cells.empty()) throw ValidationError("room has no cells: " + room.id);
    for (Cell c : room.cells) {
      if (!in_bounds(c)) throw ValidationError("room cell out of bounds in " + room.id);
      if (at(c) != CellKind::Free) throw ValidationError("room cell on non-Free cell in " + room.id);
      if (room_of_cell_[index(c)] != -1)
        throw ValidationError("room cell sets overlap at room " + room.id);
      room_of_cell_[index(c)] = static_cast<int>(r);
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Cell c{x, y};
      if (at(c) == CellKind::Free && room_of_cell_[index(c)] == -1)
        throw ValidationError("free cell belongs to no room");
    }
  }

  // Room connectivity under 4-adjacency.
  for (const Room& room : rooms) {
    if (room.cells.empty()) continue;
    std::set<Cell> remaining(room.cells.begin(), room.cells.end());
    std::vector<Cell> stack{*remaining.begin()};
    remaining.erase(remaining.begin());
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      for (Cell d : {Cell{0, -1}, Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}}) {
        Cell n{c.x + d.x, c.y + d.y};
        auto it = remaining.find(n);
        if (it != remaining.end()) {
          remaining.erase(it);
          stack.push_back(n);
        }
      }
    }
    if (!remaining.empty())
      throw ValidationError("room cells not 4-connected in " + room.id);
  }

  std::set<std::string> object_ids;
  for (const auto& obj : objects) {
    if (!object_ids.insert(obj.id).second)
      throw ValidationError("duplicate object id: " + obj.id);
    if (!in_bounds(obj.position) || at(obj.position) != CellKind::Free)
      throw ValidationError("object on non-Free cell: " + obj.id);
    const Room* room = room_at(obj.position);
    if (room == nullptr || room->id != obj.room_id)
      throw ValidationError("object room_id does not match its position: " + obj.id);
    for (const auto& [k, v] : obj.attributes) {
      if (k != "color" && k != "state" && k != "count" && k != "location_hint")
        throw ValidationError("unknown attribute key '" + k + "' on object " + obj.id);
    }
  }

  room_adj_.assign(rooms.size() * rooms.size(), 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Cell c{x, y};
      if (at(c) != CellKind::Free) continue;
      int a = room_of_cell_[index(c)];
      for (Cell d : {Cell{1, 0}, Cell{0, 1}}) {
        Cell n{c.x + d.x, c.y + d.y};
        if (!is_free(n)) continue;
        int b = room_of_cell_[index(n)];
        if (a != b) {
          room_adj_[static_cast<std::size_t>(a) * rooms.size() + b] = 1;
          room_adj_[static_cast<std::size_t>(b) * rooms.size() + a] = 1;
        }
      }
    }
  }
}

std::vector<Cell> supercover_line(Cell a, Cell b) {
  // Integer supercover walk: visit every cell the segment touches. When the
  // segment crosses a lattice corner exactly, both side cells are included.
  std::vector<Cell> out;
  int dx = b.x - a.x, dy = b.y - a.y;
  int nx = std::abs(dx), ny = std::abs(dy);
  int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
  Cell c = a;
  out.push_back(c);
  int ix = 0, iy = 0;
  while (ix < nx || iy < ny) {
    // Compare (1+2ix)/(2nx) with (1+2iy)/(2ny) without division.
    long long lhs = static_cast<long long>(1 + 2 * ix) * ny;
    long long rhs = static_cast<long long>(1 + 2 * iy) * nx;
    if (lhs == rhs) {
      // Corner crossing: both neighbors touched, then the diagonal.
      out.push_back({c.x + sx, c.y});
      out.push_back({c.x, c.y + sy});
      c.x += sx;
      c.y += sy;
      ++ix;
      ++iy;
    } else if (lhs < rhs) {
      c.x += sx;
      ++ix;
    } else {
      c.y += sy;
      ++iy;
    }
    out.push_back(c);
  }
  return out;
}

bool line_of_sight(const GridScene& scene, Cell from, Cell to) {
  for (Cell c : supercover_line(from, to)) {
    if (c == from || c == to) continue;
    if (!scene.in_bounds(c) || scene.at(c) == CellKind::Wall) return false;
  }
  return true;
}

namespace {

bool within_fov(const Pose& pose, Cell target, double fov_deg) {
  if (target == pose.position) return true;
  Cell h = heading_delta(pose.heading);
  double dx = target.x - pose.position.x;
  double dy = target.y - pose.position.y;
  double dot = h.x * dx + h.y * dy;
  double cross = h.x * dy - h.y * dx;
  double ang = std::abs(std::atan2(cross, dot)) * 180.0 / std::numbers::pi;
  return ang <= fov_deg / 2.0 + 1e-9;
}

bool cell_revealed(const GridScene& scene, const Pose& pose, Cell c, double fov_deg, int range) {
  if (!scene.in_bounds(c)) return false;
  if (chebyshev(c, pose.position) > range) return false;
  if (!within_fov(pose, c, fov_deg)) return false;
  return line_of_sight(scene, pose.position, c);
}

}  // namespace

std::vector<Cell> reveal(const GridScene& scene, const Pose& pose, double fov_deg, int range) {
  std::vector<Cell> out;
  int x0 = std::max(0, pose.position.x - range);
  int x1 = std::min(scene.width - 1, pose.position.x + range);
  int y0 = std::max(0, pose.position.y - range);
  int y1 = std::min(scene.height - 1, pose.position.y + range);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      Cell c{x, y};
      if (cell_revealed(scene, pose, c, fov_deg, range)) out.push_back(c);
    }
  }
  return out;
}

std::vector<ObjectInstance> visible_objects(const GridScene& scene, const Pose& pose,
                                            double fov_deg, int range) {
  std::vector<ObjectInstance> out;
  for (const auto& obj : scene.objects) {
    if (cell_revealed(scene, pose, obj.position, fov_deg, range)) out.push_back(obj);
  }
  return out;
}

Observation observe(const GridScene& scene, const Pose& pose, double fov_deg, int range) {
  Observation obs;
  obs.pose = pose;
  obs.visible_objects = visible_objects(scene, pose, fov_deg, range);
  obs.revealed_cells = reveal(scene, pose, fov_deg, range);
  return obs;
}

}  // namespace commcp
