#include "commcp/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace commcp {

using nlohmann::ordered_json;

namespace {

const ordered_json& require(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing key: ") + key);
  return *it;
}

std::string require_string(const ordered_json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw ParseError(std::string("key is not a string: ") + key);
  return v.get<std::string>();
}

Cell parse_cell(const ordered_json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError(std::string(what) + " must be [x, y]");
  return Cell{j[0].get<int>(), j[1].get<int>()};
}

std::map<std::string, std::string> parse_attributes(const ordered_json& j) {
  std::map<std::string, std::string> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw ParseError("attributes must be an object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      out[k] = v.get<std::string>();
    } else if (v.is_number_integer()) {
      out[k] = std::to_string(v.get<long long>());
    } else {
      throw ParseError("attribute values must be strings or integers");
    }
  }
  return out;
}

Descriptor parse_descriptor(const ordered_json& j) {
  Descriptor d;
  d.name = require_string(j, "name");
  if (j.contains("attributes")) d.attributes = parse_attributes(j["attributes"]);
  return d;
}

Question parse_question(const ordered_json& j) {
  Question q;
  q.id = require_string(j, "id");
  auto type = qtype_from_name(require_string(j, "type"));
  if (!type) throw ParseError("unknown question type on " + q.id);
  q.qtype = *type;
  q.text = require_string(j, "text");
  const auto& choices = require(j, "choices");
  if (!choices.is_array()) throw ParseError("choices must be an array on " + q.id);
  for (const auto& c : choices) q.choices.push_back(c.get<std::string>());
  std::string truth = require_string(j, "truth");
  if (truth.size() != 1) throw ParseError("truth must be a single letter on " + q.id);
  q.truth = label_index(truth[0]);
  const auto& targets = require(j, "targets");
  if (!targets.is_array()) throw ParseError("targets must be an array on " + q.id);
  for (const auto& t : targets) q.targets.push_back(parse_descriptor(t));
  q.assignee = require(j, "assignee").get<int>();
  return q;
}

void validate_question(const Question& q, const GridScene& scene) {
  bool two_choice = q.qtype == QType::Existence || q.qtype == QType::State;
  std::size_t expected = two_choice ? 2 : 4;
  if (q.choices.size() != expected)
    throw ValidationError("question " + q.id + " must have " + std::to_string(expected) +
                          " choices");
  if (q.truth < 0 || q.truth >= static_cast<int>(q.choices.size()))
    throw ValidationError("truth label out of range on question " + q.id);
  if (q.targets.empty()) throw ValidationError("question " + q.id + " has no targets");
  for (const auto& d : q.targets) {
    if (scene.matching_objects(d).empty())
      throw ValidationError("target matches no object on question " + q.id + ": " +
                            descriptor_text(d));
  }
}

}  // namespace

Scenario load_scenario(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario document is not valid JSON: ") + e.what());
  }

  Scenario out;
  try {
    const auto& meta = require(doc, "meta");
    out.scene.name = require_string(meta, "name");
    out.scene.cell_size = require(meta, "cell_size_m").get<double>();
    out.scene.seed = meta.contains("seed") ? meta["seed"].get<std::uint64_t>() : 0;

    const auto& grid = require(doc, "grid");
    if (!grid.is_array() || grid.empty()) throw ParseError("grid must be a non-empty array");
    std::vector<std::string> rows;
    for (const auto& r : grid) rows.push_back(r.get<std::string>());
    out.scene.height = static_cast<int>(rows.size());
    out.scene.width = static_cast<int>(rows[0].size());
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != out.scene.width)
        throw ParseError("grid rows have unequal length");
    }

    std::map<char, std::size_t> tag_to_room;
    const auto& rooms = require(doc, "rooms");
    for (const auto& rj : rooms) {
      Room room;
      room.id = require_string(rj, "id");
      room.label = require_string(rj, "label");
      std::string tag = require_string(rj, "tag");
      if (tag.size() != 1) throw ParseError("room tag must be a single character: " + room.id);
      if (tag_to_room.count(tag[0])) throw ParseError("duplicate room tag: " + tag);
      tag_to_room[tag[0]] = out.scene.rooms.size();
      out.scene.rooms.push_back(std::move(room));
    }

    // '.' cells form the implicit hallway room if no tagged room claims them.
    std::size_t hallway_index = std::string::npos;
    out.scene.cells.assign(static_cast<std::size_t>(out.scene.width) * out.scene.height,
                           CellKind::Wall);
    for (int y = 0; y < out.scene.height; ++y) {
      for (int x = 0; x < out.scene.width; ++x) {
        char ch = rows[y][static_cast<std::size_t>(x)];
        Cell c{x, y};
        if (ch == '#') continue;
        out.scene.cells[out.scene.index(c)] = CellKind::Free;
        if (ch == '.') {
          if (hallway_index == std::string::npos) {
            hallway_index = out.scene.rooms.size();
            out.scene.rooms.push_back(Room{"hallway", "hallway", {}});
          }
          out.scene.rooms[hallway_index].cells.push_back(c);
        } else {
          auto it = tag_to_room.find(ch);
          if (it == tag_to_room.end())
            throw ParseError(std::string("grid tag '") + ch + "' not declared in rooms");
          out.scene.rooms[it->second].cells.push_back(c);
        }
      }
    }

    const auto& objects = require(doc, "objects");
    for (const auto& oj : objects) {
      ObjectInstance obj;
      obj.id = require_string(oj, "id");
      obj.name = require_string(oj, "name");
      obj.room_id = require_string(oj, "room");
      obj.position = parse_cell(require(oj, "pos"), "object pos");
      if (oj.contains("attributes")) obj.attributes = parse_attributes(oj["attributes"]);
      out.scene.objects.push_back(std::move(obj));
    }

    std::vector<Question> questions;
    const auto& qs = require(doc, "questions");
    for (const auto& qj : qs) questions.push_back(parse_question(qj));

    out.scene.finalize();
    for (const auto& q : questions) validate_question(q, out.scene);

    int n_agents = 0;
    for (const auto& q : questions) n_agents = std::max(n_agents, q.assignee + 1);
    try {
      out.questions = assign(std::move(questions), n_agents);
    } catch (const AssignmentError& e) {
      throw ValidationError(e.what());
    }

    if (doc.contains("starts")) {
      for (const auto& sj : doc["starts"]) {
        if (!sj.is_array() || sj.size() != 3) throw ParseError("starts entries must be [x,y,heading]");
        Pose p;
        p.position = Cell{sj[0].get<int>(), sj[1].get<int>()};
        auto h = heading_from_name(sj[2].get<std::string>());
        if (!h) throw ParseError("bad heading in starts");
        p.heading = *h;
        if (!out.scene.is_free(p.position)) throw ValidationError("start pose on non-Free cell");
        out.starts.push_back(p);
      }
      if (out.starts.size() != static_cast<std::size_t>(out.questions.n_agents))
        throw ValidationError("starts count does not match agent count");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario document malformed: ") + e.what());
  }
  return out;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  ordered_json doc;
  doc["meta"] = {{"name", s.scene.name}, {"cell_size_m", s.scene.cell_size}, {"seed", s.scene.seed}};

  // Reconstruct row strings from room membership; hallway renders as '.'.
  std::vector<std::string> rows(static_cast<std::size_t>(s.scene.height),
                                std::string(static_cast<std::size_t>(s.scene.width), '#'));
  std::vector<char> tag_of_room(s.scene.rooms.size(), '.');
  char next_tag = 'a';
  ordered_json rooms = ordered_json::array();
  for (std::size_t r = 0; r < s.scene.rooms.size(); ++r) {
    const Room& room = s.scene.rooms[r];
    bool implicit_hallway = room.id == "hallway" && room.label == "hallway";
    if (!implicit_hallway) {
      tag_of_room[r] = next_tag++;
      rooms.push_back({{"id", room.id}, {"label", room.label},
                       {"tag", std::string(1, tag_of_room[r])}});
    }
    for (Cell c : room.cells)
      rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)] = tag_of_room[r];
  }
  doc["grid"] = rows;
  doc["rooms"] = rooms;

  ordered_json objects = ordered_json::array();
  for (const auto& obj : s.scene.objects) {
    ordered_json oj = {{"id", obj.id}, {"name", obj.name}, {"room", obj.room_id},
                       {"pos", {obj.position.x, obj.position.y}}};
    if (!obj.attributes.empty()) oj["attributes"] = obj.attributes;
    objects.push_back(oj);
  }
  doc["objects"] = objects;

  ordered_json questions = ordered_json::array();
  for (const auto& q : s.questions.questions) {
    ordered_json tj = ordered_json::array();
    for (const auto& t : q.targets) {
      ordered_json d = {{"name", t.name}};
      if (!t.attributes.empty()) d["attributes"] = t.attributes;
      tj.push_back(d);
    }
    questions.push_back({{"id", q.id},
                         {"type", qtype_name(q.qtype)},
                         {"text", q.text},
                         {"choices", q.choices},
                         {"truth", std::string(1, label_of(q.truth))},
                         {"targets", tj},
                         {"assignee", q.assignee}});
  }
  doc["questions"] = questions;

  if (!s.starts.empty()) {
    ordered_json starts = ordered_json::array();
    for (const Pose& p : s.starts)
      starts.push_back({p.position.x, p.position.y, heading_name(p.heading)});
    doc["starts"] = starts;
  }
  return doc.dump(2) + "\n";
}

}  // namespace commcp
