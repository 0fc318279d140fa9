#pragma once

#include <vector>

#include "socnav/planner.hpp"

namespace socnav {

struct OracleConfig {
  double w_clearance = 2.0;
  double w_pedestrian = 5.0;
  int connectivity = 8;
  bool smooth = true;

  void validate() const;
  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

// Per-cell step weight 1 + w_c * (1 - f2) + w_p * (f3 + f4 + f5), evaluated
// at cell centers. Blocked cells still get a value.
std::vector<double> social_density(const World& world, const OracleConfig& config);

// Social cost of a polyline: integral of the density of the cell under each
// point, midpoint rule with sub-steps no longer than one cell.
double social_cost(const World& world, const std::vector<double>& density, const std::vector<Vec2>& points);

// Dijkstra demonstration under the handcrafted social cost, converted to
// meters and greedily shortcut. Throws Error(infeasible) naming the scenario.
Path oracle_demo(const World& world, const OracleConfig& config = {});
Path oracle_demo(const Scenario& scenario, const OracleConfig& config = {}, const FeatureConfig& features = {});

}  // namespace socnav
