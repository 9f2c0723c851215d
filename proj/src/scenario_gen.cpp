#include "commcp/scenario_gen.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "commcp/affinity.hpp"
#include "commcp/rng.hpp"

namespace commcp {

namespace {

struct Rect {
  int x0, y0, x1, y1;  // inclusive free-cell bounds
  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  int area() const { return width() * height(); }
  bool contains(Cell c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
};

struct Split {
  bool vertical;  // wall runs along a column
  int line;
  int lo, hi;  // span of the dividing wall
};

constexpr int kMinSide = 3;

void bsp(Rect r, Rng& rng, std::vector<Rect>& leaves, std::vector<Split>& splits) {
  bool can_v = r.width() >= 2 * kMinSide + 1;
  bool can_h = r.height() >= 2 * kMinSide + 1;
  bool want = r.area() > 36 || r.width() > 8 || r.height() > 8;
  if (!(want && (can_v || can_h))) {
    leaves.push_back(r);
    return;
  }
  bool vertical = can_v && (!can_h || r.width() >= r.height());
  if (vertical) {
    int line = rng.next_int(r.x0 + kMinSide, r.x1 - kMinSide);
    splits.push_back({true, line, r.y0, r.y1});
    bsp({r.x0, r.y0, line - 1, r.y1}, rng, leaves, splits);
    bsp({line + 1, r.y0, r.x1, r.y1}, rng, leaves, splits);
  } else {
    int line = rng.next_int(r.y0 + kMinSide, r.y1 - kMinSide);
    splits.push_back({false, line, r.x0, r.x1});
    bsp({r.x0, r.y0, r.x1, line - 1}, rng, leaves, splits);
    bsp({r.x0, line + 1, r.x1, r.y1}, rng, leaves, splits);
  }
}

std::string label_display(const std::string& label) {
  std::string out = label;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

struct Builder {
  GridScene scene;
  std::vector<Rect> leaves;
  std::set<Cell> occupied;
  Rng rng;

  explicit Builder(std::uint64_t seed) : rng(seed) {}

  bool build_layout(int size_class) {
    int w = 0, h = 0;
    switch (size_class) {
      case 1:
        w = rng.next_int(10, 12);
        h = rng.next_int(10, 12);
        break;
      case 2:
        w = rng.next_int(13, 16);
        h = rng.next_int(12, 15);
        break;
      default:
        w = rng.next_int(17, 21);
        h = rng.next_int(15, 18);
        break;
    }
    scene.width = w;
    scene.height = h;
    scene.cells.assign(static_cast<std::size_t>(w) * h, CellKind::Wall);

    std::vector<Split> splits;
    bsp({1, 1, w - 2, h - 2}, rng, leaves, splits);
    for (const Rect& r : leaves) {
      for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) scene.cells[scene.index({x, y})] = CellKind::Free;
      }
    }

    // punch one doorway per split; both sides of a door must be free
    std::vector<Cell> doors;
    for (const Split& s : splits) {
      std::vector<Cell> candidates;
      for (int v = s.lo; v <= s.hi; ++v) {
        Cell door = s.vertical ? Cell{s.line, v} : Cell{v, s.line};
        Cell a = s.vertical ? Cell{s.line - 1, v} : Cell{v, s.line - 1};
        Cell b = s.vertical ? Cell{s.line + 1, v} : Cell{v, s.line + 1};
        if (scene.is_free(a) && scene.is_free(b)) candidates.push_back(door);
      }
      if (candidates.empty()) return false;
      Cell door = candidates[rng.next_below(candidates.size())];
      scene.cells[scene.index(door)] = CellKind::Free;
      doors.push_back(door);
    }

    // room labels: distinct core labels first, then random refills
    std::vector<std::string> labels = {"bedroom", "kitchen", "living_room", "bathroom",
                                       "hallway", "other"};
    for (std::size_t i = labels.size(); i > 1; --i)
      std::swap(labels[i - 1], labels[rng.next_below(i)]);
    std::map<std::string, int> label_counts;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      std::string label = i < labels.size()
                              ? labels[i]
                              : kRoomLabels[rng.next_below(kRoomLabels.size())];
      int n = ++label_counts[label];
      Room room;
      room.label = label;
      room.id = label + "_" + std::to_string(n);
      for (int y = leaves[i].y0; y <= leaves[i].y1; ++y) {
        for (int x = leaves[i].x0; x <= leaves[i].x1; ++x) room.cells.push_back({x, y});
      }
      scene.rooms.push_back(std::move(room));
    }

    // attach each door cell to an adjacent leaf room
    for (Cell door : doors) {
      for (Cell d : {Cell{-1, 0}, Cell{1, 0}, Cell{0, -1}, Cell{0, 1}}) {
        Cell n{door.x + d.x, door.y + d.y};
        bool attached = false;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
          if (leaves[i].contains(n)) {
            scene.rooms[i].cells.push_back(door);
            attached = true;
            break;
          }
        }
        if (attached) break;
      }
    }

    // whole interior must be one connected free region
    std::vector<Cell> free;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (scene.is_free({x, y})) free.push_back({x, y});
      }
    }
    if (free.empty()) return false;
    std::set<Cell> todo(free.begin(), free.end());
    std::vector<Cell> stack{*todo.begin()};
    todo.erase(todo.begin());
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      for (Cell d : {Cell{0, -1}, Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}}) {
        Cell n{c.x + d.x, c.y + d.y};
        auto it = todo.find(n);
        if (it != todo.end()) {
          todo.erase(it);
          stack.push_back(n);
        }
      }
    }
    return todo.empty();
  }

  const CatalogEntry* pick_entry_for(const std::string& label, std::set<std::string>& used) {
    const auto& catalog = object_catalog();
    std::vector<const CatalogEntry*> fits;
    for (const auto& e : catalog) {
      if (used.count(e.name)) continue;
      if (std::find(e.rooms.begin(), e.rooms.end(), label) != e.rooms.end()) fits.push_back(&e);
    }
    if (fits.empty()) {
      for (const auto& e : catalog) {
        if (!used.count(e.name)) fits.push_back(&e);
      }
    }
    if (fits.empty()) return nullptr;
    return fits[rng.next_below(fits.size())];
  }

  std::optional<Cell> free_spot(std::size_t room_idx) {
    std::vector<Cell> options;
    for (Cell c : scene.rooms[room_idx].cells) {
      if (!occupied.count(c)) options.push_back(c);
    }
    if (options.empty()) return std::nullopt;
    return options[rng.next_below(options.size())];
  }

  void place_objects() {
    int next_id = 0;
    for (std::size_t r = 0; r < leaves.size(); ++r) {
      const std::string& label = scene.rooms[r].label;
      std::set<std::string> used_here;
      int count = rng.next_int(2, 3);
      for (int k = 0; k < count; ++k) {
        const CatalogEntry* entry = pick_entry_for(label, used_here);
        if (entry == nullptr) break;
        auto spot = free_spot(r);
        if (!spot) break;
        used_here.insert(entry->name);
        ObjectInstance obj;
        obj.id = "obj" + std::to_string(next_id++);
        obj.name = entry->name;
        obj.position = *spot;
        obj.room_id = scene.rooms[r].id;
        if (entry->colorable)
          obj.attributes["color"] = color_palette()[rng.next_below(color_palette().size())];
        if (entry->stateful) obj.attributes["state"] = rng.next_bool(0.5) ? "on" : "off";
        occupied.insert(*spot);
        scene.objects.push_back(std::move(obj));
      }
      if (rng.next_bool(0.3)) {
        auto spot = free_spot(r);
        if (spot) {
          ObjectInstance obj;
          obj.id = "obj" + std::to_string(next_id++);
          obj.name = rng.next_bool(0.5) ? "window" : "ceiling light";
          obj.position = *spot;
          obj.room_id = scene.rooms[r].id;
          occupied.insert(*spot);
          scene.objects.push_back(std::move(obj));
        }
      }
    }
  }

  int name_count(const std::string& name) const {
    int n = 0;
    for (const auto& o : scene.objects) {
      if (o.name == name) ++n;
    }
    return n;
  }

  bool label_unique(const std::string& label) const {
    int n = 0;
    for (const auto& r : scene.rooms) {
      if (r.label == label) ++n;
    }
    return n == 1;
  }

  const Room& room_of(const ObjectInstance& obj) const {
    for (const auto& r : scene.rooms) {
      if (r.id == obj.room_id) return r;
    }
    return scene.rooms.front();
  }

  std::vector<std::string> location_choices(const std::string& truth_label) {
    std::vector<std::string> pool;
    for (const auto& l : kRoomLabels) {
      if (l != truth_label) pool.push_back(l);
    }
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.next_below(i)]);
    std::vector<std::string> labels = {truth_label, pool[0], pool[1], pool[2]};
    for (std::size_t i = labels.size(); i > 1; --i)
      std::swap(labels[i - 1], labels[rng.next_below(i)]);
    std::vector<std::string> out;
    for (const auto& l : labels) out.push_back("In the " + label_display(l));
    return out;
  }

  std::optional<Question> make_location(int idx) {
    std::vector<const ObjectInstance*> pool;
    for (const auto& o : scene.objects) {
      if (name_count(o.name) == 1 && !is_common_feature(o.name)) pool.push_back(&o);
    }
    if (pool.empty()) return std::nullopt;
    const ObjectInstance* obj = pool[rng.next_below(pool.size())];
    const Room& room = room_of(*obj);
    Question q;
    q.id = "q" + std::to_string(idx);
    q.qtype = QType::Location;
    q.text = "Where have I left the " + obj->name + "?";
    q.choices = location_choices(room.label);
    for (std::size_t i = 0; i < q.choices.size(); ++i) {
      if (q.choices[i] == "In the " + label_display(room.label)) q.truth = static_cast<int>(i);
    }
    q.targets.push_back({obj->name, {}});
    return q;
  }

  std::optional<Question> make_identification(int idx) {
    std::vector<const ObjectInstance*> pool;
    for (const auto& o : scene.objects) {
      if (o.attributes.count("color") && name_count(o.name) == 1) pool.push_back(&o);
    }
    if (pool.empty()) return std::nullopt;
    const ObjectInstance* obj = pool[rng.next_below(pool.size())];
    const Room& room = room_of(*obj);
    std::string truth_color = obj->attributes.at("color");
    std::vector<std::string> colors;
    for (const auto& c : color_palette()) {
      if (c != truth_color) colors.push_back(c);
    }
    for (std::size_t i = colors.size(); i > 1; --i)
      std::swap(colors[i - 1], colors[rng.next_below(i)]);
    std::vector<std::string> choices = {truth_color, colors[0], colors[1], colors[2]};
    for (std::size_t i = choices.size(); i > 1; --i)
      std::swap(choices[i - 1], choices[rng.next_below(i)]);
    Question q;
    q.id = "q" + std::to_string(idx);
    q.qtype = QType::Identification;
    q.text = "What color is the " + obj->name + " in the " + label_display(room.label) + "?";
    q.choices = choices;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      if (choices[i] == truth_color) q.truth = static_cast<int>(i);
    }
    q.targets.push_back({obj->name, {}});
    return q;
  }

  std::optional<Question> make_counting(int idx) {
    std::vector<std::size_t> rooms;
    for (std::size_t r = 0; r < scene.rooms.size(); ++r) {
      if (label_unique(scene.rooms[r].label)) rooms.push_back(r);
    }
    if (rooms.empty()) return std::nullopt;
    std::size_t r = rooms[rng.next_below(rooms.size())];
    const Room& room = scene.rooms[r];

    // count a name present in the room, or elsewhere for a None answer
    std::vector<std::string> names;
    std::vector<std::string> elsewhere;
    for (const auto& o : scene.objects) {
      if (is_common_feature(o.name)) continue;
      if (o.room_id == room.id)
        names.push_back(o.name);
      else
        elsewhere.push_back(o.name);
    }
    std::string name;
    if (!elsewhere.empty() && rng.next_bool(0.3)) {
      name = elsewhere[rng.next_below(elsewhere.size())];
      for (const auto& n : names) {
        if (n == name) return std::nullopt;  // re-rolled by caller
      }
    } else if (!names.empty()) {
      name = names[rng.next_below(names.size())];
    } else {
      return std::nullopt;
    }

    int count = 0;
    for (const auto& o : scene.objects) {
      if (o.name == name && o.room_id == room.id) ++count;
    }
    if (count > 3) return std::nullopt;

    Question q;
    q.id = "q" + std::to_string(idx);
    q.qtype = QType::Counting;
    q.text = "How many " + name + (name.back() == 's' ? "" : "s") + " are in the " +
             label_display(room.label) + "?";
    q.choices = {"None", "One", "Two", "Three"};
    q.truth = count;
    if (count == 0) {
      // anchor on something actually in the asked room
      std::vector<const ObjectInstance*> anchors;
      for (const auto& o : scene.objects) {
        if (o.room_id == room.id && !is_common_feature(o.name)) anchors.push_back(&o);
      }
      if (anchors.empty()) return std::nullopt;
      q.targets.push_back({anchors[rng.next_below(anchors.size())]->name, {}});
      q.targets.push_back({name, {}});
    } else {
      q.targets.push_back({name, {}});
    }
    return q;
  }

  std::optional<Question> make_existence(int idx) {
    std::vector<std::size_t> rooms;
    for (std::size_t r = 0; r < scene.rooms.size(); ++r) {
      if (label_unique(scene.rooms[r].label)) rooms.push_back(r);
    }
    if (rooms.empty()) return std::nullopt;
    std::size_t r = rooms[rng.next_below(rooms.size())];
    const Room& room = scene.rooms[r];

    std::vector<std::string> inside, outside;
    for (const auto& o : scene.objects) {
      if (is_common_feature(o.name)) continue;
      if (o.room_id == room.id)
        inside.push_back(o.name);
      else
        outside.push_back(o.name);
    }
    bool yes = rng.next_bool(0.5);
    std::string name;
    if (yes && !inside.empty()) {
      name = inside[rng.next_below(inside.size())];
    } else if (!outside.empty()) {
      name = outside[rng.next_below(outside.size())];
      yes = false;
      for (const auto& n : inside) {
        if (n == name) yes = true;  // present after all
      }
    } else {
      return std::nullopt;
    }

    Question q;
    q.id = "q" + std::to_string(idx);
    q.qtype = QType::Existence;
    q.text = "Is there a " + name + " in the " + label_display(room.label) + "?";
    q.choices = {"Yes", "No"};
    q.truth = yes ? 0 : 1;
    q.targets.push_back({name, {}});
    return q;
  }

  std::optional<Question> make_state(int idx) {
    std::vector<const ObjectInstance*> pool;
    for (const auto& o : scene.objects) {
      if (o.attributes.count("state") && name_count(o.name) == 1) pool.push_back(&o);
    }
    if (pool.empty()) return std::nullopt;
    const ObjectInstance* obj = pool[rng.next_below(pool.size())];
    Question q;
    q.id = "q" + std::to_string(idx);
    q.qtype = QType::State;
    q.text = "Is the " + obj->name + " turned on?";
    q.choices = {"Yes", "No"};
    q.truth = obj->attributes.at("state") == "on" ? 0 : 1;
    q.targets.push_back({obj->name, {}});
    return q;
  }

  std::vector<Question> make_questions(int n_questions, int n_agents) {
    std::vector<Question> out;
    const std::array<QType, 5> cycle = {QType::Location, QType::Identification, QType::Counting,
                                        QType::Existence, QType::State};
    std::set<std::string> texts;
    int type_cursor = 0;
    int guard = 0;
    while (static_cast<int>(out.size()) < n_questions && guard++ < 400) {
      QType t = cycle[static_cast<std::size_t>(type_cursor % 5)];
      ++type_cursor;
      std::optional<Question> q;
      int idx = static_cast<int>(out.size());
      switch (t) {
        case QType::Location: q = make_location(idx); break;
        case QType::Identification: q = make_identification(idx); break;
        case QType::Counting: q = make_counting(idx); break;
        case QType::Existence: q = make_existence(idx); break;
        case QType::State: q = make_state(idx); break;
      }
      if (!q) continue;
      if (!texts.insert(q->text).second) continue;  // avoid duplicate questions
      out.push_back(std::move(*q));
    }
    int per_agent = n_questions / n_agents;
    for (int i = 0; i < static_cast<int>(out.size()); ++i) out[i].assignee = i / per_agent;
    return out;
  }
};

}  // namespace

Scenario generate_scenario(const GenConfig& cfg) {
  if (cfg.n_agents < 1 || cfg.n_questions % cfg.n_agents != 0)
    throw ConfigError("question count must divide evenly among agents");

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::uint64_t seed = HashKey(cfg.seed).add("scenario").add(attempt).value();
    Builder b(seed);
    if (!b.build_layout(cfg.size_class)) continue;
    b.place_objects();
    std::vector<Question> questions = b.make_questions(cfg.n_questions, cfg.n_agents);
    if (static_cast<int>(questions.size()) < cfg.n_questions) continue;

    b.scene.name = "gen_s" + std::to_string(cfg.seed) + "_c" + std::to_string(cfg.size_class) +
                   "_a" + std::to_string(cfg.n_agents);
    b.scene.cell_size = 1.0;
    b.scene.seed = cfg.seed;

    Scenario scenario;
    scenario.scene = std::move(b.scene);
    try {
      scenario.scene.finalize();
      scenario.questions = assign(std::move(questions), cfg.n_agents);
      // round-trip through the document form to guarantee loadability
      return load_scenario(serialize_scenario(scenario));
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  throw ScenarioError("scenario generation failed for seed " + std::to_string(cfg.seed));
}

}  // namespace commcp
