#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(Cell a, Cell b) { return a.x == b.x && a.y == b.y; }
};

// Binary occupancy map. Cell (cx, cy) covers [cx*res, (cx+1)*res) x
// [cy*res, (cy+1)*res); storage is row-major with y as the row index.
struct OccupancyGrid {
  int width = 0;
  int height = 0;
  double resolution = 0.02;
  std::vector<std::uint8_t> cells;

  static OccupancyGrid empty(int width, int height, double resolution);

  std::size_t index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(cx);
  }
  bool in_bounds(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < width && cy < height; }
  bool in_bounds(Vec2 p) const {
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= width_m() && p.y <= height_m())) return false;
    const Cell c = cell_of(p);
    return c.x < width && c.y < height;
  }

  // Out-of-bounds cells count as occupied.
  bool occupied(int cx, int cy) const { return !in_bounds(cx, cy) || cells[index(cx, cy)] != 0; }
  void set(int cx, int cy, bool occ) { cells[index(cx, cy)] = occ ? 1 : 0; }

  Cell cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / resolution)), static_cast<int>(std::floor(p.y / resolution))};
  }
  Vec2 center(int cx, int cy) const { return {(cx + 0.5) * resolution, (cy + 0.5) * resolution}; }
  Vec2 center(Cell c) const { return center(c.x, c.y); }

  double width_m() const { return width * resolution; }
  double height_m() const { return height * resolution; }
  double diagonal() const { return std::hypot(width_m(), height_m()); }
  std::size_t occupied_count() const;

  // Throws Error(invariant_violation) naming the field.
  void validate() const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;
};

struct Pedestrian {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double body_radius = 0.3;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pedestrian&, const Pedestrian&) = default;
};

struct Scenario {
  std::string id;
  OccupancyGrid grid;
  std::vector<Pedestrian> pedestrians;
  Vec2 start;
  Vec2 goal;
  double goal_radius = 0.25;
  double robot_radius = 0.2;

  bool in_goal(Vec2 p) const { return distance(p, goal) <= goal_radius; }

  // Checks every scenario invariant, including start/goal freedom.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class PathSource { demo_human, demo_oracle, rrt, rrt_star, gan_rrt_star };

const char* to_string(PathSource s);
PathSource path_source_from_string(const std::string& s);

struct Path {
  std::string scenario_id;
  PathSource source = PathSource::rrt_star;
  std::vector<Vec2> points;

  double length() const { return polyline_length(points); }
  friend bool operator==(const Path&, const Path&) = default;
};

// Free-space membership: p is blocked when it lies in an occupied cell or an
// occupied cell center is strictly closer than robot_radius. Out of bounds is
// never free. Direct scan over the cells under the disk.
bool is_free(const OccupancyGrid& grid, double robot_radius, Vec2 p);

// Convenience form; builds a DilatedGrid for the query (see collision.hpp).
bool segment_free(const OccupancyGrid& grid, double robot_radius, Vec2 a, Vec2 b);

// Checks the Path invariants against the scenario's grid (pedestrians are not
// part of the invariant). Throws Error(invariant_violation).
void validate_path(const Scenario& scenario, const Path& path);

struct GenerateOptions {
  int count = 1;
  int width = 324;
  int height = 257;
  int pedestrian_count = 3;
  std::uint64_t seed = 0;
  double resolution = 0.02;
  int min_obstacles = 2;
  int max_obstacles = 6;
  bool empty_map = false;
  int max_attempts = 1000;
  std::string id_prefix = "scn";
};

// Seeded random corpus. Each scenario passes the grid-Dijkstra feasibility
// check (pedestrian bodies included) before it is accepted.
std::vector<Scenario> generate_scenarios(const GenerateOptions& options);

// 8-connected Dijkstra over free cell centers, pedestrians treated as
// obstacles. Returns the grid path length in meters when start reaches goal.
std::optional<double> grid_feasibility(const Scenario& scenario);

}  // namespace socnav
