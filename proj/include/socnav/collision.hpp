#pragma once

#include <cstdint>
#include <vector>

#include "socnav/features.hpp"
#include "socnav/scenario.hpp"

namespace socnav {

// Occupancy grid dilated by the robot disk. Each cell is classified once as
// entirely free, entirely blocked, or mixed; only mixed cells pay for an
// exact test against the nearby boundary cell centers. Agrees exactly with
// socnav::is_free for every point.
class DilatedGrid {
 public:
  enum class State : std::uint8_t { free, mixed, blocked };

  DilatedGrid(const OccupancyGrid& grid, double robot_radius);
  DilatedGrid(const OccupancyGrid& grid, double robot_radius, const DistanceField& field);

  bool is_free(Vec2 p) const;

  // Supercover traversal rejects any blocked cell the segment touches; mixed
  // cells are resolved at sample spacing <= resolution / 2. Endpoints are
  // always tested. Symmetric in (a, b).
  bool segment_free(Vec2 a, Vec2 b) const;

  State state(int cx, int cy) const { return states_[grid_.index(cx, cy)]; }
  const OccupancyGrid& grid() const { return grid_; }
  double robot_radius() const { return radius_; }

 private:
  void classify(const DistanceField& field);
  bool mixed_cell_free(std::size_t idx, Vec2 p) const;
  bool point_free_in_cell(Cell c, Vec2 p) const;

  OccupancyGrid grid_;
  double radius_;
  std::vector<State> states_;
  // CSR list of boundary occupied centers near each mixed cell.
  std::vector<std::int32_t> mixed_slot_;
  std::vector<std::uint32_t> cand_offset_;
  std::vector<Vec2> cand_points_;
};

// Scenario-level checker: the dilated grid plus pedestrian bodies, each a
// disk of body_radius + robot_radius. Used by the planners and the oracle.
class CollisionChecker {
 public:
  CollisionChecker(const Scenario& scenario, const DistanceField& field, bool pedestrians_block = true);

  bool is_free(Vec2 p) const;
  bool segment_free(Vec2 a, Vec2 b) const;
  const DilatedGrid& dilated() const { return dilated_; }

 private:
  DilatedGrid dilated_;
  std::vector<Vec2> ped_centers_;
  std::vector<double> ped_radii_;
};

}  // namespace socnav
