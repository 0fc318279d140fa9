#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socnav/collision.hpp"
#include "socnav/features.hpp"
#include "socnav/scenario.hpp"
#include "socnav/tinynet.hpp"

namespace socnav {

// Everything a planning run needs about one scenario, built once and shared
// read-only between runs.
struct World {
  Scenario scenario;
  FeatureConfig features;
  DistanceField field;
  CollisionChecker checker;

  World(Scenario s, FeatureConfig cfg = {});
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  FeatureVector features_at(Vec2 p) const { return extract_features(scenario, field, p, features); }
};

struct PlannerConfig {
  int max_iterations = 3000;
  double steer_step = 0.25;
  double near_radius = 0.8;
  double goal_bias = 0.05;
  double cost_weight = 4.0;         // lambda
  double discriminator_gate = 0.0;  // tau_d, 0 disables
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

struct TreeNode {
  Vec2 point;
  int parent = -1;
  double cost = 0.0;         // cumulative Cost_G from the root
  double cost_factor = 1.0;  // 1 + lambda * G(f(point)); 1 for Euclidean planners
};

struct PlanTree {
  std::vector<TreeNode> nodes;
  std::optional<int> goal_node;
};

struct PlanResult {
  PlanTree tree;
  std::optional<Path> path;
  int iterations = 0;
  // Best goal-reaching cost after each iteration (+inf before the first).
  std::vector<double> best_cost_history;
  std::string failure;

  bool success() const { return path.has_value(); }
};

// C_G(a, b) = Cost_G(a) + edge_length * (1 + lambda * G(f(b))).
double edge_cost_gan(const Mlp& generator, const FeatureVector& to_features, double from_cost, double edge_length,
                     double cost_weight);

PlanResult plan_rrt(const World& world, const PlannerConfig& config);
PlanResult plan_rrt_star(const World& world, const PlannerConfig& config);
PlanResult plan_gan_rrt_star(const World& world, const GanPair& pair, const PlannerConfig& config);

// Builds a World for a single query.
PlanResult plan_rrt(const Scenario& scenario, const PlannerConfig& config);
PlanResult plan_rrt_star(const Scenario& scenario, const PlannerConfig& config);
PlanResult plan_gan_rrt_star(const Scenario& scenario, const GanPair& pair, const PlannerConfig& config);

enum class PlannerKind { rrt, rrt_star, gan_rrt_star };
PlannerKind planner_kind_from_string(const std::string& s);  // rrt | rrtstar | ganrrtstar
PlanResult run_planner(PlannerKind kind, const World& world, const GanPair* pair, const PlannerConfig& config);

// Walks parent links from the tree's goal node (the cheapest goal-region
// node) back to the root.
std::optional<Path> extract_solution(const PlanTree& tree, const std::string& scenario_id, PathSource source);

}  // namespace socnav
