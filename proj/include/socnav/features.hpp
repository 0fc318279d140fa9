#pragma once

#include <array>
#include <limits>
#include <vector>

#include "socnav/scenario.hpp"

namespace socnav {

// Exact Euclidean distance transform over cell centers: for every cell, the
// distance in meters to the nearest occupied cell center. Occupied cells hold
// 0; with no occupied cells every entry is +infinity.
class DistanceField {
 public:
  DistanceField() = default;
  static DistanceField build(const OccupancyGrid& grid);

  // Distance from each cell center to the nearest cell where `site` is true.
  static DistanceField build_from_sites(int width, int height, double resolution,
                                        const std::vector<std::uint8_t>& site);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }

  double at(int cx, int cy) const { return dist_[static_cast<std::size_t>(cy) * width_ + cx]; }
  // Nearest-cell lookup; p is clamped into the grid.
  double at(Vec2 p) const;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  std::vector<double> dist_;
};

struct FeatureConfig {
  double sigma_front = 1.2;
  double sigma_back = 0.6;
  double sigma_side = 0.45;
  double sigma_side_lon = 0.9;
  double d_clamp = 2.0;
  bool lateral_symmetric = false;

  void validate() const;
  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

inline constexpr std::size_t kFeatureCount = 5;
using FeatureVector = std::array<double, kFeatureCount>;

// f1 goal distance, f2 clearance, f3/f4/f5 pedestrian front/back/right.
FeatureVector extract_features(const Scenario& scenario, const DistanceField& field, Vec2 p,
                               const FeatureConfig& config = {});

// The three pedestrian terms only (f3, f4, f5); grid independent.
std::array<double, 3> pedestrian_features(const std::vector<Pedestrian>& pedestrians, Vec2 p,
                                          const FeatureConfig& config);

}  // namespace socnav
