#include "commcp/explore.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace commcp {

void OccupancyMap::update(const std::vector<Cell>& revealed, const GridScene& scene) {
  for (Cell c : revealed) {
    if (!in_bounds(c)) throw PositionOutOfBounds("revealed cell out of bounds");
    states_[index(c)] = scene.at(c) == CellKind::Free ? CellState::FreeSeen : CellState::WallSeen;
  }
}

std::size_t OccupancyMap::known_cells() const {
  return static_cast<std::size_t>(
      std::count_if(states_.begin(), states_.end(), [](CellState s) { return s != CellState::Unknown; }));
}

std::vector<FrontierPoint> detect_frontiers(const OccupancyMap& map) {
  std::vector<FrontierPoint> out;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      Cell c{x, y};
      if (map.at(c) != CellState::FreeSeen) continue;
      bool frontier = false;
      for (Cell d : {Cell{0, -1}, Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}}) {
        Cell n{c.x + d.x, c.y + d.y};
        if (map.in_bounds(n) && map.at(n) == CellState::Unknown) {
          frontier = true;
          break;
        }
      }
      if (frontier) out.push_back({c});
    }
  }
  return out;
}

double sv_com(int n_relevant, int n_target, double tau1, double tau2) {
  double arg = tau1 * n_relevant + tau2 * n_target;
  return arg < 1.0 ? 0.0 : std::log(arg);
}

double sv_point(double sv_no_com, double sv_com) { return std::max(sv_no_com, sv_com); }

double sv_final(const std::vector<double>& per_question) {
  if (per_question.empty()) return 0.0;
  double sum = 0.0;
  for (double v : per_question) sum += v;
  return sum / static_cast<double>(per_question.size());
}

std::vector<double>& SemanticValueMap::layer(const std::string& question_id) {
  auto it = layers_.find(question_id);
  if (it == layers_.end()) {
    it = layers_.emplace(question_id,
                         std::vector<double>(static_cast<std::size_t>(width_) * height_, 0.0))
             .first;
  }
  return it->second;
}

const std::vector<double>* SemanticValueMap::find_layer(const std::string& question_id) const {
  auto it = layers_.find(question_id);
  return it == layers_.end() ? nullptr : &it->second;
}

void SemanticValueMap::remove_layer(const std::string& question_id) { layers_.erase(question_id); }

void apply_message(SemanticValueMap& svmap, const Message& message,
                   const std::string& question_id, double tau1, double tau2,
                   const std::vector<FrontierPoint>& frontiers) {
  if (frontiers.empty()) return;

  auto nearest = [&](Cell pos) -> std::size_t {
    if (pos.x < 0 || pos.y < 0 || pos.x >= svmap.width() || pos.y >= svmap.height())
      throw PositionOutOfBounds("message position outside the map");
    std::size_t best = 0;
    int best_d = manhattan(pos, frontiers[0].position);
    for (std::size_t i = 1; i < frontiers.size(); ++i) {
      int d = manhattan(pos, frontiers[i].position);
      if (d < best_d) {  // frontiers are row-major, so ties keep the lower index
        best_d = d;
        best = i;
      }
    }
    return best;
  };

  std::vector<int> n_relevant(frontiers.size(), 0);
  std::vector<int> n_target(frontiers.size(), 0);
  for (const auto& r : message.relevants) ++n_relevant[nearest(r.position)];
  for (const auto& t : message.targets_seen) ++n_target[nearest(t.position)];

  auto& layer = svmap.layer(question_id);
  for (std::size_t i = 0; i < frontiers.size(); ++i) {
    if (n_relevant[i] == 0 && n_target[i] == 0) continue;
    std::size_t idx = svmap.width() * static_cast<std::size_t>(frontiers[i].position.y) +
                      frontiers[i].position.x;
    layer[idx] = sv_point(layer[idx], sv_com(n_relevant[i], n_target[i], tau1, tau2));
  }
}

std::vector<double> smooth(const std::vector<double>& field, int width, int height, double sigma) {
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[static_cast<std::size_t>(i + radius)];
  }
  for (double& k : kernel) k /= sum;

  auto pass = [&](const std::vector<double>& in, bool horizontal) {
    std::vector<double> out(in.size(), 0.0);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int sx = x, sy = y;
          if (horizontal)
            sx = std::clamp(x + i, 0, width - 1);
          else
            sy = std::clamp(y + i, 0, height - 1);
          acc += kernel[static_cast<std::size_t>(i + radius)] *
                 in[static_cast<std::size_t>(sy) * width + sx];
        }
        out[static_cast<std::size_t>(y) * width + x] = acc;
      }
    }
    return out;
  };
  return pass(pass(field, true), false);
}

FrontierPoint select_goal(const std::vector<FrontierPoint>& frontiers,
                          const std::vector<double>& smoothed, int width, Rng& rng) {
  if (frontiers.empty()) throw NoFrontierError("no frontier points remain");
  std::size_t best = 0;
  double best_v = -1.0;
  bool any_positive = false;
  for (std::size_t i = 0; i < frontiers.size(); ++i) {
    double v = smoothed[static_cast<std::size_t>(frontiers[i].position.y) * width +
                        frontiers[i].position.x];
    if (v > 0.0) any_positive = true;
    if (v > best_v) {  // strict: row-major ties resolve to the lower index
      best_v = v;
      best = i;
    }
  }
  if (!any_positive) return frontiers[rng.next_below(frontiers.size())];
  return frontiers[best];
}

std::vector<Cell> plan_path(const OccupancyMap& map, Cell from, Cell to) {
  if (!map.in_bounds(from) || map.at(from) != CellState::FreeSeen)
    throw UnreachableError("path start not on a seen free cell");
  if (!map.in_bounds(to) || map.at(to) != CellState::FreeSeen)
    throw UnreachableError("path goal not on a seen free cell");
  if (from == to) return {from};

  struct Node {
    int f;
    std::uint64_t seq;
    Cell cell;
  };
  auto cmp = [](const Node& a, const Node& b) {
    return a.f != b.f ? a.f > b.f : a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);

  const std::size_t n = static_cast<std::size_t>(map.width()) * map.height();
  std::vector<int> g(n, -1);
  std::vector<int> parent(n, -1);
  std::uint64_t seq = 0;

  g[map.index(from)] = 0;
  open.push({manhattan(from, to), seq++, from});

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    std::size_t ci = map.index(node.cell);
    int gc = g[ci];
    if (node.f > gc + manhattan(node.cell, to)) continue;  // stale entry
    if (node.cell == to) break;
    for (Cell d : {Cell{0, -1}, Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}}) {
      Cell nb{node.cell.x + d.x, node.cell.y + d.y};
      if (!map.in_bounds(nb) || map.at(nb) != CellState::FreeSeen) continue;
      std::size_t ni = map.index(nb);
      if (g[ni] == -1 || gc + 1 < g[ni]) {
        g[ni] = gc + 1;
        parent[ni] = static_cast<int>(ci);
        open.push({g[ni] + manhattan(nb, to), seq++, nb});
      }
    }
  }

  if (g[map.index(to)] == -1) throw UnreachableError("goal not reachable through seen free cells");

  std::vector<Cell> path;
  std::size_t cur = map.index(to);
  while (true) {
    path.push_back({static_cast<int>(cur % map.width()), static_cast<int>(cur / map.width())});
    if (parent[cur] == -1) break;
    cur = static_cast<std::size_t>(parent[cur]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace commcp
