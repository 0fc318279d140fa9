#include "socnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "socnav/collision.hpp"
#include "socnav/error.hpp"
#include "socnav/features.hpp"
#include "socnav/grid_search.hpp"
#include "socnav/rng.hpp"

namespace socnav {

OccupancyGrid OccupancyGrid::empty(int width, int height, double resolution) {
  OccupancyGrid g;
  g.width = width;
  g.height = height;
  g.resolution = resolution;
  g.cells.assign(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), 0);
  return g;
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }));
}

void OccupancyGrid::validate() const {
  if (width < 8) throw Error(errc::invariant_violation, "width", "must be >= 8");
  if (height < 8) throw Error(errc::invariant_violation, "height", "must be >= 8");
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw Error(errc::invariant_violation, "resolution", "must be positive and finite");
  if (cells.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(errc::invariant_violation, "cells", "length must equal width * height");
  for (auto c : cells) {
    if (c > 1) throw Error(errc::invariant_violation, "cells", "values must be 0 or 1");
  }
}

void Scenario::validate() const {
  grid.validate();
  if (!(goal_radius > 0.0) || !std::isfinite(goal_radius))
    throw Error(errc::invariant_violation, "goal_radius", "must be positive");
  if (!(robot_radius >= 0.0) || !std::isfinite(robot_radius))
    throw Error(errc::invariant_violation, "robot_radius", "must be non-negative");
  if (!grid.in_bounds(start)) throw Error(errc::out_of_bounds, "start", "outside the map");
  if (!grid.in_bounds(goal)) throw Error(errc::out_of_bounds, "goal", "outside the map");
  if (start == goal) throw Error(errc::invariant_violation, "goal", "start and goal must be distinct");
  if (!is_free(grid, robot_radius, start)) throw Error(errc::invariant_violation, "start", "not in free space");
  if (!is_free(grid, robot_radius, goal)) throw Error(errc::invariant_violation, "goal", "not in free space");
  for (std::size_t i = 0; i < pedestrians.size(); ++i) {
    const Pedestrian& p = pedestrians[i];
    const std::string field = "pedestrians[" + std::to_string(i) + "]";
    if (!grid.in_bounds(p.position())) throw Error(errc::out_of_bounds, field, "outside the map");
    if (!(p.body_radius > 0.0) || !std::isfinite(p.body_radius))
      throw Error(errc::invariant_violation, field + ".body_radius", "must be positive");
    if (!(p.speed >= 0.0) || !std::isfinite(p.speed))
      throw Error(errc::invariant_violation, field + ".speed", "must be non-negative");
    if (!(p.heading >= -M_PI && p.heading < M_PI))
      throw Error(errc::invariant_violation, field + ".heading", "must lie in [-pi, pi)");
  }
}

const char* to_string(PathSource s) {
  switch (s) {
    case PathSource::demo_human:
      return "demo_human";
    case PathSource::demo_oracle:
      return "demo_oracle";
    case PathSource::rrt:
      return "rrt";
    case PathSource::rrt_star:
      return "rrt_star";
    case PathSource::gan_rrt_star:
      return "gan_rrt_star";
  }
  return "unknown";
}

PathSource path_source_from_string(const std::string& s) {
  for (PathSource p : {PathSource::demo_human, PathSource::demo_oracle, PathSource::rrt, PathSource::rrt_star,
                       PathSource::gan_rrt_star}) {
    if (s == to_string(p)) return p;
  }
  throw Error(errc::malformed_document, "source", "unknown path source '" + s + "'");
}

bool is_free(const OccupancyGrid& grid, double robot_radius, Vec2 p) {
  if (!grid.in_bounds(p)) return false;
  const Cell home = grid.cell_of(p);
  if (grid.occupied(home.x, home.y)) return false;
  const double res = grid.resolution;
  const int x0 = std::max(0, static_cast<int>(std::floor((p.x - robot_radius) / res - 0.5)));
  const int x1 = std::min(grid.width - 1, static_cast<int>(std::ceil((p.x + robot_radius) / res - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::floor((p.y - robot_radius) / res - 0.5)));
  const int y1 = std::min(grid.height - 1, static_cast<int>(std::ceil((p.y + robot_radius) / res - 0.5)));
  const double r2 = robot_radius * robot_radius;
  for (int cy = y0; cy <= y1; ++cy) {
    for (int cx = x0; cx <= x1; ++cx) {
      if (grid.cells[grid.index(cx, cy)] && squared_distance(p, grid.center(cx, cy)) < r2) return false;
    }
  }
  return true;
}

bool segment_free(const OccupancyGrid& grid, double robot_radius, Vec2 a, Vec2 b) {
  return DilatedGrid(grid, robot_radius).segment_free(a, b);
}

void validate_path(const Scenario& scenario, const Path& path) {
  if (path.points.size() < 2) throw Error(errc::invariant_violation, "points", "a path needs at least 2 points");
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const Vec2 p = path.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !scenario.grid.in_bounds(p))
      throw Error(errc::out_of_bounds, "points[" + std::to_string(i) + "]", "outside the map");
  }
  if (distance(path.points.front(), scenario.start) > 1e-9)
    throw Error(errc::invariant_violation, "points[0]", "first point must equal the scenario start");
  if (!scenario.in_goal(path.points.back()))
    throw Error(errc::invariant_violation, "points[" + std::to_string(path.points.size() - 1) + "]",
                "last point must lie in the goal region");
  const DilatedGrid dilated(scenario.grid, scenario.robot_radius);
  for (std::size_t i = 1; i < path.points.size(); ++i) {
    if (!dilated.segment_free(path.points[i - 1], path.points[i]))
      throw Error(errc::invariant_violation, "points[" + std::to_string(i) + "]",
                  "segment " + std::to_string(i - 1) + "-" + std::to_string(i) + " collides");
  }
}

std::optional<double> grid_feasibility(const Scenario& scenario) {
  const DistanceField field = DistanceField::build(scenario.grid);
  const CollisionChecker checker(scenario, field);
  const auto src = anchor_cell(checker, scenario.start);
  const auto dst = anchor_cell(checker, scenario.goal);
  if (!src || !dst) return std::nullopt;
  const auto path = grid_dijkstra(checker, *src, *dst);
  if (!path) return std::nullopt;
  return path->cost + distance(scenario.start, scenario.grid.center(*src)) +
         distance(scenario.goal, scenario.grid.center(*dst));
}

namespace {

void paint_rect(OccupancyGrid& g, int x0, int y0, int w, int h) {
  for (int y = std::max(0, y0); y < std::min(g.height, y0 + h); ++y)
    for (int x = std::max(0, x0); x < std::min(g.width, x0 + w); ++x) g.set(x, y, true);
}

void paint_disc(OccupancyGrid& g, double cx, double cy, double r) {
  for (int y = std::max(0, int(cy - r) - 1); y <= std::min(g.height - 1, int(cy + r) + 1); ++y)
    for (int x = std::max(0, int(cx - r) - 1); x <= std::min(g.width - 1, int(cx + r) + 1); ++x)
      if ((x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy) <= r * r) g.set(x, y, true);
}

void paint_obstacles(OccupancyGrid& g, const GenerateOptions& o, Rng& rng) {
  const int count = rng.uniform_int(o.min_obstacles, o.max_obstacles);
  const int lo = std::min(g.width, g.height);
  for (int k = 0; k < count; ++k) {
    if (rng.uniform() < 0.5) {
      const int w = std::max(2, static_cast<int>(g.width * rng.uniform(0.06, 0.2)));
      const int h = std::max(2, static_cast<int>(g.height * rng.uniform(0.06, 0.2)));
      paint_rect(g, rng.uniform_int(0, g.width - w), rng.uniform_int(0, g.height - h), w, h);
    } else {
      const double cx = rng.uniform(0.0, g.width);
      const double cy = rng.uniform(0.0, g.height);
      const int lobes = rng.uniform_int(2, 4);
      for (int l = 0; l < lobes; ++l) {
        const double r = lo * rng.uniform(0.03, 0.08);
        paint_disc(g, cx + rng.normal() * lo * 0.05, cy + rng.normal() * lo * 0.05, r);
      }
    }
  }
}

std::optional<Vec2> sample_free(const OccupancyGrid& g, double radius, Rng& rng, int tries) {
  for (int t = 0; t < tries; ++t) {
    const Vec2 p{rng.uniform(0.0, g.width_m()), rng.uniform(0.0, g.height_m())};
    if (is_free(g, radius, p)) return p;
  }
  return std::nullopt;
}

std::optional<Scenario> try_generate(const GenerateOptions& o, int index, Rng& rng) {
  Scenario s;
  char id[64];
  std::snprintf(id, sizeof id, "%s_%03d", o.id_prefix.c_str(), index);
  s.id = id;
  s.grid = OccupancyGrid::empty(o.width, o.height, o.resolution);
  if (!o.empty_map) paint_obstacles(s.grid, o, rng);

  const double min_sep = 0.4 * s.grid.diagonal();
  bool placed = false;
  for (int t = 0; t < 200 && !placed; ++t) {
    const auto a = sample_free(s.grid, s.robot_radius, rng, 50);
    const auto b = sample_free(s.grid, s.robot_radius, rng, 50);
    if (!a || !b || distance(*a, *b) < min_sep) continue;
    s.start = *a;
    s.goal = *b;
    placed = true;
  }
  if (!placed) return std::nullopt;

  // Pedestrians gather around the start-goal corridor so that the social
  // choice (front/behind, left/right) actually arises.
  const Vec2 axis = s.goal - s.start;
  const Vec2 perp = Vec2{-axis.y, axis.x} * (1.0 / norm(axis));
  for (int k = 0; k < o.pedestrian_count; ++k) {
    bool ok = false;
    for (int t = 0; t < 100 && !ok; ++t) {
      Pedestrian p;
      const Vec2 base = s.start + axis * rng.uniform(0.25, 0.75) + perp * (rng.normal() * 0.6);
      p.x = base.x;
      p.y = base.y;
      p.heading = rng.uniform(-M_PI, M_PI);
      if (p.heading >= M_PI) p.heading = -M_PI;
      if (!s.grid.in_bounds(base) || !is_free(s.grid, p.body_radius, base)) continue;
      const double clear = p.body_radius + s.robot_radius + 0.5;
      if (distance(base, s.start) < clear || distance(base, s.goal) < clear) continue;
      bool apart = true;
      for (const Pedestrian& q : s.pedestrians) apart = apart && distance(base, q.position()) >= p.body_radius + q.body_radius + 0.1;
      if (!apart) continue;
      s.pedestrians.push_back(p);
      ok = true;
    }
    if (!ok) return std::nullopt;
  }
  if (!grid_feasibility(s)) return std::nullopt;
  return s;
}

}  // namespace

std::vector<Scenario> generate_scenarios(const GenerateOptions& o) {
  if (o.count < 1) throw Error(errc::invalid_config, "count", "must be >= 1");
  if (o.width < 8 || o.height < 8) throw Error(errc::invalid_config, "width/height", "must be >= 8");
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(o.count));
  for (int i = 0; i < o.count; ++i) {
    Rng rng(derive_seed(o.seed, static_cast<std::uint64_t>(i)));
    std::optional<Scenario> s;
    for (int attempt = 0; attempt < o.max_attempts && !s; ++attempt) s = try_generate(o, i, rng);
    if (!s) {
      throw Error(errc::generation_failed, "scenario[" + std::to_string(i) + "]",
                  "rejection budget of " + std::to_string(o.max_attempts) + " attempts exhausted");
    }
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace socnav
