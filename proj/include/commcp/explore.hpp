#pragma once

#include <map>
#include <string>
#include <vector>

#include "commcp/comms.hpp"
#include "commcp/rng.hpp"
#include "commcp/scene.hpp"

namespace commcp {

enum class CellState : std::uint8_t { Unknown, FreeSeen, WallSeen };

class OccupancyMap {
 public:
  OccupancyMap() = default;
  OccupancyMap(int width, int height)
      : width_(width), height_(height),
        states_(static_cast<std::size_t>(width) * height, CellState::Unknown) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_; }
  CellState at(Cell c) const { return states_[index(c)]; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  // Revealed cells transition Unknown -> FreeSeen/WallSeen per scene truth.
  void update(const std::vector<Cell>& revealed, const GridScene& scene);

  std::size_t known_cells() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellState> states_;
};

struct FrontierPoint {
  Cell position;
  bool operator==(const FrontierPoint&) const = default;
};

// FreeSeen cells 4-adjacent to at least one Unknown cell, row-major order.
std::vector<FrontierPoint> detect_frontiers(const OccupancyMap& map);

// Communicated semantic value: log(tau1*n_relevant + tau2*n_target), clamped
// to 0 while the argument is below 1 so values stay non-negative.
double sv_com(int n_relevant, int n_target, double tau1, double tau2);

double sv_point(double sv_no_com, double sv_com);

// Mean over the unsolved questions' values; 0 when none remain.
double sv_final(const std::vector<double>& per_question);

// Per-question communicated-value layers over the grid.
class SemanticValueMap {
 public:
  SemanticValueMap() = default;
  SemanticValueMap(int width, int height) : width_(width), height_(height) {}

  std::vector<double>& layer(const std::string& question_id);
  const std::vector<double>* find_layer(const std::string& question_id) const;
  void remove_layer(const std::string& question_id);
  void clear() { layers_.clear(); }

  int width() const { return width_; }
  int height() const { return height_; }
  const std::map<std::string, std::vector<double>>& layers() const { return layers_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::map<std::string, std::vector<double>> layers_;
};

// Applies a message to one question layer: each message object position
// counts toward its nearest frontier point (Manhattan distance, ties to the
// lower row-major index), and the layer takes max(existing, sv_com(counts)).
void apply_message(SemanticValueMap& svmap, const Message& message,
                   const std::string& question_id, double tau1, double tau2,
                   const std::vector<FrontierPoint>& frontiers);

// Separable Gaussian blur, kernel truncated at 3*sigma and normalized,
// replicate edges; preserves constants and total mass.
std::vector<double> smooth(const std::vector<double>& field, int width, int height, double sigma);

// Argmax of the smoothed field over the frontiers, ties to the lower
// row-major index; uniform seeded choice when every value is zero.
FrontierPoint select_goal(const std::vector<FrontierPoint>& frontiers,
                          const std::vector<double>& smoothed, int width, Rng& rng);

// Shortest 4-connected path through FreeSeen cells (A*, Manhattan heuristic,
// N/E/S/W expansion order). Includes both endpoints.
std::vector<Cell> plan_path(const OccupancyMap& map, Cell from, Cell to);

}  // namespace commcp
