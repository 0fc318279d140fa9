#include "socnav/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/error.hpp"
#include "socnav/grid_search.hpp"

namespace socnav {

void OracleConfig::validate() const {
  if (!(w_clearance >= 0.0) || !std::isfinite(w_clearance))
    throw Error(errc::invalid_config, "w_clearance", "must be finite and >= 0");
  if (!(w_pedestrian >= 0.0) || !std::isfinite(w_pedestrian))
    throw Error(errc::invalid_config, "w_pedestrian", "must be finite and >= 0");
  if (connectivity != 8) throw Error(errc::invalid_config, "connectivity", "only 8 is supported");
}

std::vector<double> social_density(const World& world, const OracleConfig& config) {
  const OccupancyGrid& g = world.scenario.grid;
  std::vector<double> out(g.cells.size());
  for (int cy = 0; cy < g.height; ++cy) {
    for (int cx = 0; cx < g.width; ++cx) {
      const FeatureVector f = world.features_at(g.center(cx, cy));
      out[g.index(cx, cy)] = 1.0 + config.w_clearance * (1.0 - f[1]) + config.w_pedestrian * (f[2] + f[3] + f[4]);
    }
  }
  return out;
}

namespace {

double segment_cost(const OccupancyGrid& g, const std::vector<double>& density, Vec2 a, Vec2 b) {
  const double len = distance(a, b);
  if (len == 0.0) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil(len / g.resolution)));
  const double h = len / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    Cell c = g.cell_of(lerp(a, b, (k + 0.5) / n));
    c.x = std::clamp(c.x, 0, g.width - 1);
    c.y = std::clamp(c.y, 0, g.height - 1);
    sum += density[g.index(c.x, c.y)];
  }
  return sum * h;
}

}  // namespace

double social_cost(const World& world, const std::vector<double>& density, const std::vector<Vec2>& points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    total += segment_cost(world.scenario.grid, density, points[i - 1], points[i]);
  return total;
}

Path oracle_demo(const World& world, const OracleConfig& config) {
  config.validate();
  const Scenario& s = world.scenario;
  const auto fail = [&](const std::string& why) { return Error(errc::infeasible, "scenario " + s.id, why); };
  const auto src = anchor_cell(world.checker, s.start);
  const auto dst = anchor_cell(world.checker, s.goal);
  if (!src || !dst) throw fail("start or goal has no free anchor cell");
  const std::vector<double> density = social_density(world, config);
  const auto grid_path = grid_dijkstra(world.checker, *src, *dst, density);
  if (!grid_path) throw fail("goal unreachable on the free grid");

  std::vector<Vec2> pts;
  pts.push_back(s.start);
  for (const Cell& c : grid_path->cells) {
    const Vec2 p = s.grid.center(c);
    if (!(p == pts.back())) pts.push_back(p);
  }
  if (!(s.goal == pts.back())) pts.push_back(s.goal);
  if (pts.size() < 2) pts.push_back(s.goal);

  if (config.smooth && pts.size() > 2) {
    const OccupancyGrid& g = s.grid;
    // prefix[i]: cost of the current polyline from pts[0] to pts[i].
    std::vector<double> prefix(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) prefix[i] = prefix[i - 1] + segment_cost(g, density, pts[i - 1], pts[i]);
    std::vector<Vec2> out{pts.front()};
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
      std::size_t next = i + 1;
      for (std::size_t j = pts.size() - 1; j > i + 1; --j) {
        const double direct = segment_cost(g, density, pts[i], pts[j]);
        if (direct > prefix[j] - prefix[i]) continue;
        if (!world.checker.segment_free(pts[i], pts[j])) continue;
        next = j;
        break;
      }
      out.push_back(pts[next]);
      i = next;
    }
    pts = std::move(out);
  }

  Path path;
  path.scenario_id = s.id;
  path.source = PathSource::demo_oracle;
  path.points = std::move(pts);
  return path;
}

Path oracle_demo(const Scenario& scenario, const OracleConfig& config, const FeatureConfig& features) {
  const World world(scenario, features);
  return oracle_demo(world, config);
}

}  // namespace socnav
