#pragma once

#include "socnav/scenario.hpp"

namespace socnav::test {

inline Scenario open_scenario(int w, int h, double res, Vec2 start, Vec2 goal) {
  Scenario s;
  s.id = "t";
  s.grid = OccupancyGrid::empty(w, h, res);
  s.start = start;
  s.goal = goal;
  return s;
}

// Marks cells [x0, x1] x [y0, y1] occupied.
inline void fill_box(OccupancyGrid& g, int x0, int y0, int x1, int y1) {
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) g.set(x, y, true);
}

inline Path make_path(const Scenario& s, std::vector<Vec2> pts, PathSource src = PathSource::demo_oracle) {
  Path p;
  p.scenario_id = s.id;
  p.source = src;
  p.points = std::move(pts);
  return p;
}

}  // namespace socnav::test
