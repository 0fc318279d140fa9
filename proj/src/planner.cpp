#include "socnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/error.hpp"
#include "socnav/rng.hpp"

namespace socnav {

World::World(Scenario s, FeatureConfig cfg)
    : scenario(std::move(s)), features(cfg), field(DistanceField::build(scenario.grid)), checker(scenario, field) {}

void PlannerConfig::validate() const {
  if (max_iterations < 0) throw Error(errc::invalid_config, "max_iterations", "must be >= 0");
  if (!(steer_step > 0.0)) throw Error(errc::invalid_config, "steer_step", "must be > 0");
  if (!(near_radius > 0.0)) throw Error(errc::invalid_config, "near_radius", "must be > 0");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw Error(errc::invalid_config, "goal_bias", "must lie in [0, 1]");
  if (!(cost_weight >= 0.0) || !std::isfinite(cost_weight))
    throw Error(errc::invalid_config, "cost_weight", "must be finite and >= 0");
  if (!(discriminator_gate >= 0.0 && discriminator_gate < 1.0))
    throw Error(errc::invalid_config, "discriminator_gate", "must lie in [0, 1)");
}

double edge_cost_gan(const Mlp& generator, const FeatureVector& to_features, double from_cost, double edge_length,
                     double cost_weight) {
  return from_cost + edge_length * (1.0 + cost_weight * forward_scalar(generator, to_features));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class TreeSearch {
 public:
  TreeSearch(const World& world, const PlannerConfig& cfg, const GanPair* pair, bool optimize)
      : world_(world), cfg_(cfg), pair_(pair), optimize_(optimize), rng_(cfg.seed) {}

  PlanResult run() {
    cfg_.validate();
    if (pair_ && (pair_->generator.input_size() != static_cast<int>(kFeatureCount) ||
                  pair_->generator.output_size() != 1)) {
      throw Error(errc::dimension_mismatch, "generator", "generator must map 5 features to 1 cost");
    }
    const Scenario& s = world_.scenario;
    PlanResult result;
    add_node(s.start, -1, 0.0, 1.0);

    if (s.in_goal(s.start) && world_.checker.segment_free(s.start, s.goal)) {
      const int g = add_node(s.goal, 0, distance(s.start, s.goal) * factor_for(s.goal), factor_for(s.goal));
      goal_nodes_.push_back(g);
      return finish(result, 0);
    }

    std::vector<int> near;
    std::vector<std::pair<double, int>> ranked;
    int it = 0;
    for (; it < cfg_.max_iterations; ++it) {
      step(near, ranked);
      result.best_cost_history.push_back(best_goal_cost());
      if (!optimize_ && !goal_nodes_.empty()) {
        ++it;
        break;
      }
    }
    return finish(result, it);
  }

 private:
  double factor_for(Vec2 p) const {
    if (!pair_) return 1.0;
    return 1.0 + cfg_.cost_weight * pair_->cost(world_.features_at(p));
  }

  int add_node(Vec2 p, int parent, double cost, double factor) {
    tree_.nodes.push_back({p, parent, cost, factor});
    children_.emplace_back();
    if (parent >= 0) children_[static_cast<std::size_t>(parent)].push_back(static_cast<int>(tree_.nodes.size() - 1));
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  Vec2 sample() {
    const Scenario& s = world_.scenario;
    if (rng_.uniform() < cfg_.goal_bias) return s.goal;
    Vec2 p;
    for (int t = 0; t < 100; ++t) {
      p = {rng_.uniform(0.0, s.grid.width_m()), rng_.uniform(0.0, s.grid.height_m())};
      if (world_.checker.is_free(p)) break;
    }
    return p;
  }

  int nearest(Vec2 p) const {
    int best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < tree_.nodes.size(); ++i) {
      const double d = squared_distance(tree_.nodes[i].point, p);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  void near_set(Vec2 p, std::vector<int>& out) const {
    out.clear();
    const double r2 = cfg_.near_radius * cfg_.near_radius;
    for (std::size_t i = 0; i < tree_.nodes.size(); ++i) {
      if (squared_distance(tree_.nodes[i].point, p) <= r2) out.push_back(static_cast<int>(i));
    }
  }

  void step(std::vector<int>& near, std::vector<std::pair<double, int>>& ranked) {
    const Vec2 rand = sample();
    const int nn = nearest(rand);
    const Vec2 from = tree_.nodes[static_cast<std::size_t>(nn)].point;
    const double d = distance(from, rand);
    if (d == 0.0) return;
    const Vec2 x_new = d <= cfg_.steer_step ? rand : lerp(from, rand, cfg_.steer_step / d);
    if (!world_.checker.segment_free(from, x_new)) return;

    double factor = 1.0;
    if (pair_) {
      const FeatureVector f = world_.features_at(x_new);
      const double c = pair_->cost(f);
      if (cfg_.discriminator_gate > 0.0 && pair_->score(f, c) < cfg_.discriminator_gate) return;
      factor = 1.0 + cfg_.cost_weight * c;
    }

    if (!optimize_) {
      const int id = add_node(x_new, nn, tree_.nodes[static_cast<std::size_t>(nn)].cost + distance(from, x_new) * factor, factor);
      if (world_.scenario.in_goal(x_new)) goal_nodes_.push_back(id);
      return;
    }

    near_set(x_new, near);
    // Parent choice: the cheapest collision-free candidate; the nearest node
    // wins ties, then the lowest index. Collision checks run in cost order so
    // the first free candidate is the answer.
    ranked.clear();
    ranked.push_back({tree_.nodes[static_cast<std::size_t>(nn)].cost + distance(from, x_new) * factor, -1});
    for (int idx : near) {
      if (idx == nn) continue;
      const TreeNode& n = tree_.nodes[static_cast<std::size_t>(idx)];
      ranked.push_back({n.cost + distance(n.point, x_new) * factor, idx});
    }
    std::sort(ranked.begin(), ranked.end());
    int parent = nn;
    double c_min = ranked.front().first;
    for (const auto& [c, idx] : ranked) {
      if (idx < 0) {
        parent = nn;
        c_min = c;
        break;
      }
      if (world_.checker.segment_free(tree_.nodes[static_cast<std::size_t>(idx)].point, x_new)) {
        parent = idx;
        c_min = c;
        break;
      }
    }
    const int id = add_node(x_new, parent, c_min, factor);
    if (world_.scenario.in_goal(x_new)) goal_nodes_.push_back(id);

    for (int idx : near) {
      if (idx == parent) continue;
      TreeNode& n = tree_.nodes[static_cast<std::size_t>(idx)];
      const double c = c_min + distance(x_new, n.point) * n.cost_factor;
      if (!(c < n.cost)) continue;
      if (!world_.checker.segment_free(x_new, n.point)) continue;
      reparent(idx, id);
    }
  }

  void reparent(int node, int new_parent) {
    TreeNode& n = tree_.nodes[static_cast<std::size_t>(node)];
    auto& old_children = children_[static_cast<std::size_t>(n.parent)];
    old_children.erase(std::find(old_children.begin(), old_children.end(), node));
    n.parent = new_parent;
    children_[static_cast<std::size_t>(new_parent)].push_back(node);
    propagate(node);
  }

  void propagate(int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      TreeNode& n = tree_.nodes[static_cast<std::size_t>(i)];
      const TreeNode& p = tree_.nodes[static_cast<std::size_t>(n.parent)];
      n.cost = p.cost + distance(p.point, n.point) * n.cost_factor;
      for (int c : children_[static_cast<std::size_t>(i)]) stack.push_back(c);
    }
  }

  double best_goal_cost() const {
    double best = kInf;
    for (int g : goal_nodes_) best = std::min(best, tree_.nodes[static_cast<std::size_t>(g)].cost);
    return best;
  }

  PlanResult& finish(PlanResult& result, int iterations) {
    result.iterations = iterations;
    double best = kInf;
    for (int g : goal_nodes_) {
      const double c = tree_.nodes[static_cast<std::size_t>(g)].cost;
      if (c < best || (c == best && g < *tree_.goal_node)) {
        best = c;
        tree_.goal_node = g;
      }
    }
    result.tree = std::move(tree_);
    const PathSource source = pair_ ? PathSource::gan_rrt_star : (optimize_ ? PathSource::rrt_star : PathSource::rrt);
    result.path = extract_solution(result.tree, world_.scenario.id, source);
    if (!result.path) result.failure = "no path found within " + std::to_string(iterations) + " iterations";
    return result;
  }

  const World& world_;
  const PlannerConfig& cfg_;
  const GanPair* pair_;
  bool optimize_;
  Rng rng_;
  PlanTree tree_;
  std::vector<std::vector<int>> children_;
  std::vector<int> goal_nodes_;
};

}  // namespace

PlanResult plan_rrt(const World& world, const PlannerConfig& config) {
  return TreeSearch(world, config, nullptr, false).run();
}

PlanResult plan_rrt_star(const World& world, const PlannerConfig& config) {
  return TreeSearch(world, config, nullptr, true).run();
}

PlanResult plan_gan_rrt_star(const World& world, const GanPair& pair, const PlannerConfig& config) {
  return TreeSearch(world, config, &pair, true).run();
}

PlanResult plan_rrt(const Scenario& scenario, const PlannerConfig& config) {
  const World world(scenario);
  return plan_rrt(world, config);
}

PlanResult plan_rrt_star(const Scenario& scenario, const PlannerConfig& config) {
  const World world(scenario);
  return plan_rrt_star(world, config);
}

PlanResult plan_gan_rrt_star(const Scenario& scenario, const GanPair& pair, const PlannerConfig& config) {
  const World world(scenario);
  return plan_gan_rrt_star(world, pair, config);
}

PlannerKind planner_kind_from_string(const std::string& s) {
  if (s == "rrt") return PlannerKind::rrt;
  if (s == "rrtstar" || s == "rrt_star") return PlannerKind::rrt_star;
  if (s == "ganrrtstar" || s == "gan_rrt_star") return PlannerKind::gan_rrt_star;
  throw Error(errc::invalid_config, "planner", "unknown planner '" + s + "' (expected rrt|rrtstar|ganrrtstar)");
}

PlanResult run_planner(PlannerKind kind, const World& world, const GanPair* pair, const PlannerConfig& config) {
  switch (kind) {
    case PlannerKind::rrt:
      return plan_rrt(world, config);
    case PlannerKind::rrt_star:
      return plan_rrt_star(world, config);
    case PlannerKind::gan_rrt_star:
      if (!pair) throw Error(errc::invalid_config, "model", "ganrrtstar needs a model");
      return plan_gan_rrt_star(world, *pair, config);
  }
  throw Error(errc::invalid_config, "planner", "unknown planner");
}

std::optional<Path> extract_solution(const PlanTree& tree, const std::string& scenario_id, PathSource source) {
  if (!tree.goal_node) return std::nullopt;
  Path path;
  path.scenario_id = scenario_id;
  path.source = source;
  for (int i = *tree.goal_node; i >= 0; i = tree.nodes[static_cast<std::size_t>(i)].parent) {
    path.points.push_back(tree.nodes[static_cast<std::size_t>(i)].point);
    if (path.points.size() > tree.nodes.size()) return std::nullopt;
  }
  std::reverse(path.points.begin(), path.points.end());
  return path;
}

}  // namespace socnav
