#include "socnav/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace socnav {

namespace {

bool is_boundary_cell(const OccupancyGrid& grid, int cx, int cy) {
  static constexpr int kDx[4] = {1, -1, 0, 0};
  static constexpr int kDy[4] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const int nx = cx + kDx[k];
    const int ny = cy + kDy[k];
    if (grid.in_bounds(nx, ny) && !grid.occupied(nx, ny)) return true;
  }
  return false;
}

// Visits every cell the closed segment touches, including both neighbours
// when it passes exactly through a lattice corner. Stops early when `visit`
// returns false.
template <typename Visit>
bool supercover(Vec2 a, Vec2 b, double res, Visit&& visit) {
  const double x0 = a.x / res, y0 = a.y / res, x1 = b.x / res, y1 = b.y / res;
  int cx = static_cast<int>(std::floor(x0));
  int cy = static_cast<int>(std::floor(y0));
  const int ex = static_cast<int>(std::floor(x1));
  const int ey = static_cast<int>(std::floor(y1));
  if (!visit(cx, cy)) return false;
  const double dx = x1 - x0, dy = y1 - y0;
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double t_max_x = sx == 0 ? inf : (sx > 0 ? (cx + 1 - x0) : (x0 - cx)) / std::abs(dx);
  double t_max_y = sy == 0 ? inf : (sy > 0 ? (cy + 1 - y0) : (y0 - cy)) / std::abs(dy);
  const double t_dx = sx == 0 ? inf : 1.0 / std::abs(dx);
  const double t_dy = sy == 0 ? inf : 1.0 / std::abs(dy);
  const int budget = std::abs(ex - cx) + std::abs(ey - cy) + 4;
  for (int step = 0; step < budget && (cx != ex || cy != ey); ++step) {
    if (std::min(t_max_x, t_max_y) > 1.0) break;
    if (t_max_x < t_max_y) {
      cx += sx;
      t_max_x += t_dx;
    } else if (t_max_y < t_max_x) {
      cy += sy;
      t_max_y += t_dy;
    } else {
      if (!visit(cx + sx, cy) || !visit(cx, cy + sy)) return false;
      cx += sx;
      cy += sy;
      t_max_x += t_dx;
      t_max_y += t_dy;
    }
    if (!visit(cx, cy)) return false;
  }
  return true;
}

}  // namespace

DilatedGrid::DilatedGrid(const OccupancyGrid& grid, double robot_radius)
    : DilatedGrid(grid, robot_radius, DistanceField::build(grid)) {}

DilatedGrid::DilatedGrid(const OccupancyGrid& grid, double robot_radius, const DistanceField& field)
    : grid_(grid), radius_(robot_radius) {
  classify(field);
}

void DilatedGrid::classify(const DistanceField& field) {
  const double res = grid_.resolution;
  const double half_diag = res * std::sqrt(0.5);
  const double reach = radius_ + half_diag + 1e-9;
  const std::size_t n = grid_.cells.size();
  states_.assign(n, State::free);
  mixed_slot_.assign(n, -1);
  cand_offset_.clear();
  cand_points_.clear();
  cand_offset_.push_back(0);
  const int window = static_cast<int>(std::ceil(reach / res)) + 1;

  for (int cy = 0; cy < grid_.height; ++cy) {
    for (int cx = 0; cx < grid_.width; ++cx) {
      const std::size_t idx = grid_.index(cx, cy);
      if (grid_.cells[idx]) {
        states_[idx] = State::blocked;
        continue;
      }
      const double d = field.at(cx, cy);
      if (d >= reach) continue;
      if (d + half_diag < radius_ - 1e-9) {
        states_[idx] = State::blocked;
        continue;
      }
      states_[idx] = State::mixed;
      mixed_slot_[idx] = static_cast<std::int32_t>(cand_offset_.size() - 1);
      const Vec2 c = grid_.center(cx, cy);
      for (int oy = std::max(0, cy - window); oy <= std::min(grid_.height - 1, cy + window); ++oy) {
        for (int ox = std::max(0, cx - window); ox <= std::min(grid_.width - 1, cx + window); ++ox) {
          if (!grid_.cells[grid_.index(ox, oy)] || !is_boundary_cell(grid_, ox, oy)) continue;
          const Vec2 oc = grid_.center(ox, oy);
          if (distance(oc, c) <= reach) cand_points_.push_back(oc);
        }
      }
      cand_offset_.push_back(static_cast<std::uint32_t>(cand_points_.size()));
    }
  }
}

bool DilatedGrid::mixed_cell_free(std::size_t idx, Vec2 p) const {
  const auto slot = static_cast<std::size_t>(mixed_slot_[idx]);
  const double r2 = radius_ * radius_;
  for (std::uint32_t k = cand_offset_[slot]; k < cand_offset_[slot + 1]; ++k) {
    if (squared_distance(p, cand_points_[k]) < r2) return false;
  }
  return true;
}

bool DilatedGrid::point_free_in_cell(Cell c, Vec2 p) const {
  const std::size_t idx = grid_.index(c.x, c.y);
  switch (states_[idx]) {
    case State::free:
      return true;
    case State::blocked:
      return false;
    case State::mixed:
      return mixed_cell_free(idx, p);
  }
  return false;
}

bool DilatedGrid::is_free(Vec2 p) const {
  if (!grid_.in_bounds(p)) return false;
  return point_free_in_cell(grid_.cell_of(p), p);
}

bool DilatedGrid::segment_free(Vec2 a, Vec2 b) const {
  if (b < a) std::swap(a, b);
  if (!is_free(a) || !is_free(b)) return false;
  if (a == b) return true;

  const bool cover_ok = supercover(a, b, grid_.resolution, [&](int cx, int cy) {
    if (!grid_.in_bounds(cx, cy)) return true;
    return states_[grid_.index(cx, cy)] != State::blocked;
  });
  if (!cover_ok) return false;

  const double len = distance(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * grid_.resolution))));
  for (int k = 1; k < n; ++k) {
    const Vec2 p = lerp(a, b, static_cast<double>(k) / n);
    Cell c = grid_.cell_of(p);
    c.x = std::clamp(c.x, 0, grid_.width - 1);
    c.y = std::clamp(c.y, 0, grid_.height - 1);
    if (!point_free_in_cell(c, p)) return false;
  }
  return true;
}

CollisionChecker::CollisionChecker(const Scenario& scenario, const DistanceField& field, bool pedestrians_block)
    : dilated_(scenario.grid, scenario.robot_radius, field) {
  if (pedestrians_block) {
    for (const Pedestrian& ped : scenario.pedestrians) {
      ped_centers_.push_back(ped.position());
      ped_radii_.push_back(ped.body_radius + scenario.robot_radius);
    }
  }
}

bool CollisionChecker::is_free(Vec2 p) const {
  for (std::size_t i = 0; i < ped_centers_.size(); ++i) {
    if (squared_distance(p, ped_centers_[i]) < ped_radii_[i] * ped_radii_[i]) return false;
  }
  return dilated_.is_free(p);
}

bool CollisionChecker::segment_free(Vec2 a, Vec2 b) const {
  if (b < a) std::swap(a, b);
  for (std::size_t i = 0; i < ped_centers_.size(); ++i) {
    if (point_segment_distance(ped_centers_[i], a, b) < ped_radii_[i]) return false;
  }
  return dilated_.segment_free(a, b);
}

}  // namespace socnav
