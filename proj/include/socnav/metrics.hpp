#pragma once

#include <string>
#include <vector>

#include "socnav/planner.hpp"

namespace socnav {

// One vertical ray per homotopy obstacle, cast upward from a point strictly
// inside the obstacle. Ids are 1-based: occupancy components first, then
// pedestrians, each group in scanline order of the ray origins.
struct HomotopyRay {
  int id = 0;
  Vec2 origin;
  bool pedestrian = false;
};

struct HSignature {
  std::vector<int> word;  // +k / -k, reduced
  friend bool operator==(const HSignature&, const HSignature&) = default;
};

std::vector<HomotopyRay> homotopy_rays(const Scenario& scenario, bool include_pedestrians = true);

// Signed crossings of the rays by the polyline, reduced. Throws
// Error(out_of_bounds) when a vertex leaves the map.
HSignature h_signature(const Scenario& scenario, const std::vector<HomotopyRay>& rays, const std::vector<Vec2>& points);
HSignature h_signature(const Scenario& scenario, const Path& path, bool include_pedestrians = true);

// Removes adjacent inverse pairs until none remain.
std::vector<int> reduce_word(const std::vector<int>& word);

// Both paths are closed onto the scenario start and goal before comparing.
// Throws Error(endpoint_mismatch) when an endpoint is farther than
// goal_radius from the start or goal.
bool same_homotopy(const Scenario& scenario, const std::vector<HomotopyRay>& rays, const Path& a, const Path& b);
bool same_homotopy(const Scenario& scenario, const Path& a, const Path& b, bool include_pedestrians = true);

inline constexpr int kDissimilaritySamples = 100;

// Trapezoid sum of the distance from resampled path_1 to path_2, divided by
// the number of resampled segments. Throws Error(invariant_violation) on a
// path with fewer than two points.
double dissimilarity(const Path& path_1, const Path& path_2, bool symmetric = false);

// Mean feature vector over the path resampled at `spacing`.
FeatureVector path_feature_mean(const World& world, const Path& path, double spacing = 0.2);

// (1 / 5S) * sum over scenarios and features of |demo - plan|.
double feature_difference(const std::vector<FeatureVector>& demo_means, const std::vector<FeatureVector>& plan_means);
double feature_difference(const std::vector<const World*>& worlds, const std::vector<Path>& demos,
                          const std::vector<Path>& plans, double spacing = 0.2);

double homotopy_rate(const std::vector<const Scenario*>& scenarios, const std::vector<Path>& demos,
                     const std::vector<Path>& plans, bool include_pedestrians = true);

struct MetricReport {
  std::string scenario_id;
  double dissimilarity = 0.0;
  double feature_difference = 0.0;  // this scenario's term of the aggregate
  bool homotopic = false;
  double path_length_demo = 0.0;
  double path_length_plan = 0.0;
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct MetricAggregate {
  double homotopy_rate = 0.0;
  double mean_dissimilarity = 0.0;
  double feature_difference = 0.0;
  friend bool operator==(const MetricAggregate&, const MetricAggregate&) = default;
};

struct MetricOptions {
  bool include_pedestrians = true;
  bool symmetric_dissimilarity = false;
  double feature_spacing = 0.2;
};

MetricReport evaluate_pair(const World& world, const Path& demo, const Path& plan, const MetricOptions& options = {});
// Failed plans count against the homotopy rate and are left out of the
// other means.
MetricAggregate aggregate(const std::vector<MetricReport>& reports, int failures = 0);

}  // namespace socnav
