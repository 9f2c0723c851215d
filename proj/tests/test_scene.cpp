#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "commcp/rng.hpp"
#include "commcp/scenario.hpp"
#include "commcp/scene.hpp"

using namespace commcp;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string minimal_doc(const std::string& object_pos = "[1, 1]") {
  return R"({
    "meta": {"name": "mini", "cell_size_m": 1.0, "seed": 0},
    "grid": ["aaa", "aaa", "aaa"],
    "rooms": [{"id": "r0", "label": "other", "tag": "a"}],
    "objects": [{"id": "o0", "name": "ball", "room": "r0", "pos": )" +
         object_pos + R"(}],
    "questions": [{
      "id": "q0", "type": "Existence", "text": "Is there a ball in the room?",
      "choices": ["Yes", "No"], "truth": "A",
      "targets": [{"name": "ball"}], "assignee": 0
    }]
  })";
}

// Exact segment/cell-square intersection on doubled integer coordinates; the
// independent oracle for supercover traversal and line of sight.
struct Pt {
  long long x, y;
};

long long orient(Pt a, Pt b, Pt c) {
  long long v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment(Pt a, Pt b, Pt p) {
  return orient(a, b, p) == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(Pt a, Pt b, Pt c, Pt d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b);
}

bool segment_touches_cell(Cell a, Cell b, Cell cell) {
  Pt A{2LL * a.x, 2LL * a.y}, B{2LL * b.x, 2LL * b.y};
  Pt c0{2LL * cell.x - 1, 2LL * cell.y - 1}, c1{2LL * cell.x + 1, 2LL * cell.y - 1};
  Pt c2{2LL * cell.x + 1, 2LL * cell.y + 1}, c3{2LL * cell.x - 1, 2LL * cell.y + 1};
  auto inside = [&](Pt p) {
    return c0.x <= p.x && p.x <= c2.x && c0.y <= p.y && p.y <= c2.y;
  };
  if (inside(A) || inside(B)) return true;
  return segments_touch(A, B, c0, c1) || segments_touch(A, B, c1, c2) ||
         segments_touch(A, B, c2, c3) || segments_touch(A, B, c3, c0);
}

bool oracle_los(const GridScene& scene, Cell from, Cell to) {
  int x0 = std::min(from.x, to.x), x1 = std::max(from.x, to.x);
  int y0 = std::min(from.y, to.y), y1 = std::max(from.y, to.y);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      Cell c{x, y};
      if (c == from || c == to) continue;
      if (!segment_touches_cell(from, to, c)) continue;
      if (!scene.in_bounds(c) || scene.at(c) == CellKind::Wall) return false;
    }
  }
  return true;
}

bool oracle_in_fov(const Pose& pose, Cell c, double fov_deg) {
  if (c == pose.position) return true;
  Cell h = heading_delta(pose.heading);
  double vx = c.x - pose.position.x, vy = c.y - pose.position.y;
  double cosang = (h.x * vx + h.y * vy) / std::sqrt(vx * vx + vy * vy);
  cosang = std::clamp(cosang, -1.0, 1.0);
  double ang = std::acos(cosang) * 180.0 / std::numbers::pi;
  return ang <= fov_deg / 2.0 + 1e-9;
}

GridScene open_scene(int w, int h) {
  GridScene s;
  s.name = "open";
  s.width = w;
  s.height = h;
  s.cells.assign(static_cast<std::size_t>(w) * h, CellKind::Free);
  Room r{"r0", "other", {}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) r.cells.push_back({x, y});
  s.rooms.push_back(r);
  s.finalize();
  return s;
}

}  // namespace

TEST_CASE("minimal scenario parses") {
  Scenario s = load_scenario(minimal_doc());
  CHECK(s.scene.width == 3);
  CHECK(s.scene.height == 3);
  CHECK(s.scene.objects.size() == 1);
  CHECK(s.questions.questions.size() == 1);
  CHECK(s.questions.n_agents == 1);
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_AS(load_scenario("not json"), ParseError);
  CHECK_THROWS_AS(load_scenario("{}"), ParseError);

  SUBCASE("object on wall cell") {
    std::string doc = minimal_doc();
    auto pos = doc.find("\"aaa\", \"aaa\"");
    doc.replace(pos, 12, "\"aaa\", \"a#a\"");
    CHECK_THROWS_WITH_AS(load_scenario(doc), doctest::Contains("non-Free"), ValidationError);
  }
  SUBCASE("question target matches nothing") {
    std::string doc = minimal_doc();
    auto pos = doc.find("{\"name\": \"ball\"}");
    doc.replace(pos, 16, "{\"name\": \"ghost\"}");
    CHECK_THROWS_AS(load_scenario(doc), ValidationError);
  }
  SUBCASE("uneven assignment") {
    // Two questions for agents 0 and 2: agent 1 ends up with none.
    std::string doc = minimal_doc();
    auto pos = doc.find("\"assignee\": 0");
    std::string two = R"("assignee": 0},
      {"id": "q1", "type": "Existence", "text": "Is there a ball in the room?",
       "choices": ["Yes", "No"], "truth": "A",
       "targets": [{"name": "ball"}], "assignee": 2)";
    doc.replace(pos, 13, two);
    CHECK_THROWS_AS(load_scenario(doc), ValidationError);
  }
}

TEST_CASE("house_small fixture matches its hand-written structure") {
  Scenario s = load_scenario(read_file(std::string(COMMCP_FIXTURES_DIR) + "/house_small.json"));
  CHECK(s.scene.width == 12);
  CHECK(s.scene.height == 10);
  CHECK(s.scene.rooms.size() == 4);
  CHECK(s.scene.objects.size() == 9);
  CHECK(s.questions.questions.size() == 6);
  CHECK(s.questions.n_agents == 2);
  CHECK(s.questions.per_agent == 3);

  const ObjectInstance* cushion = s.scene.object_by_id("obj_cushion");
  REQUIRE(cushion != nullptr);
  CHECK(cushion->position == Cell{3, 2});
  CHECK(cushion->attributes.at("color") == "red");
  CHECK(s.scene.room_at(cushion->position)->label == "bedroom");

  // bedroom and kitchen both open onto the hallway but not onto each other
  CHECK(s.scene.rooms_adjacent(0, 2));
  CHECK(s.scene.rooms_adjacent(1, 2));
  CHECK_FALSE(s.scene.rooms_adjacent(0, 1));
}

TEST_CASE("scenario round-trip keeps semantic content") {
  std::string text = read_file(std::string(COMMCP_FIXTURES_DIR) + "/house_small.json");
  Scenario a = load_scenario(text);
  Scenario b = load_scenario(serialize_scenario(a));
  CHECK(a.scene.width == b.scene.width);
  CHECK(a.scene.height == b.scene.height);
  CHECK(a.scene.cells == b.scene.cells);
  REQUIRE(a.scene.rooms.size() == b.scene.rooms.size());
  for (const Room& ra : a.scene.rooms) {
    auto it = std::find_if(b.scene.rooms.begin(), b.scene.rooms.end(),
                           [&](const Room& rb) { return rb.id == ra.id; });
    REQUIRE(it != b.scene.rooms.end());
    CHECK(it->label == ra.label);
    CHECK(std::set<Cell>(it->cells.begin(), it->cells.end()) ==
          std::set<Cell>(ra.cells.begin(), ra.cells.end()));
  }
  REQUIRE(a.scene.objects.size() == b.scene.objects.size());
  for (std::size_t i = 0; i < a.scene.objects.size(); ++i) {
    CHECK(a.scene.objects[i].id == b.scene.objects[i].id);
    CHECK(a.scene.objects[i].position == b.scene.objects[i].position);
    CHECK(a.scene.objects[i].attributes == b.scene.objects[i].attributes);
  }
  REQUIRE(a.questions.questions.size() == b.questions.questions.size());
  for (std::size_t i = 0; i < a.questions.questions.size(); ++i) {
    CHECK(a.questions.questions[i].id == b.questions.questions[i].id);
    CHECK(a.questions.questions[i].truth == b.questions.questions[i].truth);
    CHECK(a.questions.questions[i].choices == b.questions.questions[i].choices);
    CHECK(a.questions.questions[i].targets == b.questions.questions[i].targets);
    CHECK(a.questions.questions[i].assignee == b.questions.questions[i].assignee);
  }
}

TEST_CASE("visibility basics") {
  GridScene s = open_scene(9, 9);
  s.objects.push_back({"o0", "ball", {}, {4, 3}, "r0"});

  SUBCASE("adjacent object in heading direction") {
    auto vis = visible_objects(s, Pose{{4, 4}, Heading::North}, 90.0, 5);
    REQUIRE(vis.size() == 1);
    CHECK(vis[0].id == "o0");
  }
  SUBCASE("object behind a wall") {
    s.cells[s.index({4, 3})] = CellKind::Free;  // keep object cell free
    GridScene blocked = s;
    blocked.objects[0].position = {4, 1};
    blocked.cells[blocked.index({4, 2})] = CellKind::Wall;
    auto vis = visible_objects(blocked, Pose{{4, 4}, Heading::North}, 90.0, 5);
    CHECK(vis.empty());
  }
  SUBCASE("out of range") {
    auto vis = visible_objects(s, Pose{{4, 8}, Heading::North}, 360.0, 2);
    CHECK(vis.empty());
  }
}

TEST_CASE("7x7 visibility equals exhaustive predicate oracle") {
  GridScene s = open_scene(7, 7);
  s.objects.push_back({"o0", "a", {}, {1, 1}, "r0"});
  s.objects.push_back({"o1", "b", {}, {5, 1}, "r0"});
  s.objects.push_back({"o2", "c", {}, {3, 0}, "r0"});
  s.objects.push_back({"o3", "d", {}, {0, 6}, "r0"});
  s.objects.push_back({"o4", "e", {}, {6, 3}, "r0"});

  Pose pose{{3, 3}, Heading::North};
  auto vis = visible_objects(s, pose, 90.0, 3);
  std::set<std::string> got;
  for (const auto& o : vis) got.insert(o.id);

  std::set<std::string> expected;
  for (const auto& o : s.objects) {
    bool in = chebyshev(o.position, pose.position) <= 3 &&
              oracle_in_fov(pose, o.position, 90.0) && oracle_los(s, pose.position, o.position);
    if (in) expected.insert(o.id);
  }
  CHECK(got == expected);
  // layout is hand-checkable too: o0 at 45 degrees within the cone, o2 ahead
  CHECK(got == std::set<std::string>{"o0", "o1", "o2"});
}

TEST_CASE("reveal on walled-in cell") {
  GridScene s;
  s.name = "boxed";
  s.width = 3;
  s.height = 3;
  s.cells.assign(9, CellKind::Wall);
  s.cells[s.index({1, 1})] = CellKind::Free;
  s.rooms.push_back(Room{"r0", "other", {{1, 1}}});
  s.finalize();

  auto cells = reveal(s, Pose{{1, 1}, Heading::North}, 360.0, 3);
  std::set<Cell> got(cells.begin(), cells.end());
  // ray tracing by hand: the pose cell plus the four orthogonal walls; the
  // diagonal walls sit behind corner contacts of two wall squares
  std::set<Cell> expected{{1, 1}, {1, 0}, {0, 1}, {2, 1}, {1, 2}};
  CHECK(got == expected);
}

TEST_CASE("reveal degenerate and open cases") {
  GridScene s = open_scene(5, 5);
  SUBCASE("range zero reveals only the pose cell") {
    auto cells = reveal(s, Pose{{2, 2}, Heading::East}, 360.0, 0);
    CHECK(cells == std::vector<Cell>{{2, 2}});
  }
  SUBCASE("open room fully revealed") {
    auto cells = reveal(s, Pose{{2, 2}, Heading::East}, 360.0, 10);
    CHECK(cells.size() == 25);
  }
}

TEST_CASE("reveal properties on random maps") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    int w = rng.next_int(4, 12), h = rng.next_int(4, 12);
    GridScene s = open_scene(w, h);
    // scatter walls, keep the pose cell free
    for (int i = 0; i < w * h / 4; ++i) {
      Cell c{rng.next_int(0, w - 1), rng.next_int(0, h - 1)};
      s.cells[s.index(c)] = CellKind::Wall;
    }
    Cell pc;
    do {
      pc = {rng.next_int(0, w - 1), rng.next_int(0, h - 1)};
    } while (s.at(pc) == CellKind::Wall);
    Pose pose{pc, Heading::East};

    // monotone in range
    auto r1 = reveal(s, pose, 120.0, 3);
    auto r2 = reveal(s, pose, 120.0, 6);
    CHECK(std::includes(r2.begin(), r2.end(), r1.begin(), r1.end()));

    // LOS agrees with the exact geometric oracle on every cell
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        CHECK(line_of_sight(s, pc, {x, y}) == oracle_los(s, pc, {x, y}));
      }
    }

    // visible object positions are a subset of revealed cells
    s.objects.clear();
    GridScene s2 = s;
    for (int i = 0; i < 5; ++i) {
      Cell c{rng.next_int(0, w - 1), rng.next_int(0, h - 1)};
      if (s2.at(c) == CellKind::Wall) continue;
      s2.objects.push_back({"o" + std::to_string(i), "thing", {}, c, ""});
    }
    auto rev = reveal(s2, pose, 90.0, 5);
    std::set<Cell> revset(rev.begin(), rev.end());
    for (const auto& o : visible_objects(s2, pose, 90.0, 5)) {
      CHECK(revset.count(o.position) == 1);
    }
  }
}
