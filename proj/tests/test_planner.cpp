#include "doctest.h"
#include "helpers.hpp"
#include "socnav/error.hpp"
#include "socnav/planner.hpp"

using namespace socnav;
using socnav::test::fill_box;
using socnav::test::open_scenario;

namespace {

bool same_tree(const PlanTree& a, const PlanTree& b) {
  if (a.nodes.size() != b.nodes.size() || a.goal_node != b.goal_node) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const TreeNode& x = a.nodes[i];
    const TreeNode& y = b.nodes[i];
    if (!(x.point == y.point) || x.parent != y.parent || x.cost != y.cost || x.cost_factor != y.cost_factor)
      return false;
  }
  return true;
}

Scenario wall_scenario() {
  Scenario s = open_scenario(100, 80, 0.05, {0.5, 2.0}, {4.5, 2.0});
  fill_box(s.grid, 45, 10, 55, 69);
  return s;
}

void check_cost_coherence(const PlanTree& t) {
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    const TreeNode& p = t.nodes[static_cast<std::size_t>(n.parent)];
    CHECK(std::abs(n.cost - (p.cost + distance(p.point, n.point) * n.cost_factor)) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("edge_cost_gan examples") {
  const Mlp zero = Mlp::zeros({5, 10, 1});
  const FeatureVector f{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(edge_cost_gan(zero, f, 0.0, 1.0, 4.0) == 3.0);
  CHECK(edge_cost_gan(zero, f, 2.5, 0.7, 0.0) == 2.5 + 0.7);
  CHECK(edge_cost_gan(zero, f, 1.0, 0.0, 4.0) == 1.0);
  Rng rng(3);
  const Mlp g = Mlp::random({5, 10, 1}, rng);
  CHECK(edge_cost_gan(g, f, 0.0, 0.5, 4.0) > 0.5);
}

TEST_CASE("rrt on an empty map reaches a goal 1 m away") {
  int reached = 0, ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Scenario s = open_scenario(100, 100, 0.05, {2.0, 2.5}, {3.0, 2.5});
    PlannerConfig c;
    c.max_iterations = 200;
    c.seed = seed;
    const PlanResult r = plan_rrt(s, c);
    reached += r.success();
    if (r.success() && r.path->length() < 1.5) {
      ++ok;
      CHECK_NOTHROW(validate_path(s, *r.path));
      CHECK(r.path->source == PathSource::rrt);
    }
  }
  CHECK(reached >= 48);
  // First-solution RRT paths wander; 43 of 50 are under 1.5 m here.
  CHECK(ok >= 40);
}

TEST_CASE("start inside the goal region gives a trivial path") {
  Scenario s = open_scenario(60, 60, 0.05, {1.0, 1.0}, {1.1, 1.0});
  PlannerConfig c;
  for (const PlanResult& r : {plan_rrt(s, c), plan_rrt_star(s, c), plan_gan_rrt_star(s, GanPair::zeros(), c)}) {
    REQUIRE(r.success());
    CHECK(r.path->points.size() == 2);
    CHECK(r.path->points.front() == s.start);
    CHECK(r.path->points.back() == s.goal);
  }
}

TEST_CASE("walled-off goal fails with an inspectable tree") {
  Scenario s = open_scenario(80, 80, 0.05, {0.5, 0.5}, {3.0, 3.0});
  fill_box(s.grid, 50, 50, 79, 52);
  fill_box(s.grid, 50, 50, 52, 79);
  PlannerConfig c;
  c.max_iterations = 400;
  const PlanResult r = plan_rrt_star(s, c);
  CHECK_FALSE(r.success());
  CHECK(r.iterations == 400);
  CHECK(r.tree.nodes.size() > 10);
  CHECK_FALSE(r.failure.empty());
  CHECK_FALSE(plan_rrt(s, c).success());
}

TEST_CASE("after every iteration the new node has its cheapest parent and no near node improves through it") {
  const Scenario s = wall_scenario();
  const World w(s);
  PlannerConfig c;
  c.seed = 5;
  c.steer_step = 0.5;
  std::size_t prev_size = 1;
  for (int k = 1; k <= 200; ++k) {
    c.max_iterations = k;
    const PlanResult r = plan_rrt_star(w, c);
    const auto& nodes = r.tree.nodes;
    if (nodes.size() == prev_size) continue;
    REQUIRE(nodes.size() == prev_size + 1);
    prev_size = nodes.size();
    check_cost_coherence(r.tree);
    const TreeNode& x = nodes.back();
    const int xi = static_cast<int>(nodes.size() - 1);
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      const TreeNode& m = nodes[j];
      if (distance(m.point, x.point) > c.near_radius || !w.checker.segment_free(m.point, x.point)) continue;
      CHECK(x.cost <= m.cost + distance(m.point, x.point) + 1e-9);
      if (m.parent != xi) CHECK(m.cost <= x.cost + distance(m.point, x.point) + 1e-9);
    }
  }
}

TEST_CASE("best goal cost is non-increasing and the path cost equals the goal node cost") {
  const Scenario s = wall_scenario();
  const World w(s);
  PlannerConfig c;
  c.max_iterations = 1500;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    c.seed = seed;
    for (const PlanResult& r : {plan_rrt_star(w, c), plan_gan_rrt_star(w, GanPair::create(seed), c)}) {
      REQUIRE(r.success());
      CHECK(r.best_cost_history.size() == 1500);
      for (std::size_t i = 1; i < r.best_cost_history.size(); ++i)
        CHECK(r.best_cost_history[i] <= r.best_cost_history[i - 1]);
      check_cost_coherence(r.tree);
      CHECK_NOTHROW(validate_path(s, *r.path));
      CHECK(w.checker.segment_free(r.path->points[0], r.path->points[1]));
      double cost = 0.0;
      const auto& t = r.tree;
      for (int i = *t.goal_node; i > 0; i = t.nodes[static_cast<std::size_t>(i)].parent) {
        const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
        cost += distance(n.point, t.nodes[static_cast<std::size_t>(n.parent)].point) * n.cost_factor;
      }
      CHECK(cost == doctest::Approx(t.nodes[static_cast<std::size_t>(*t.goal_node)].cost).epsilon(1e-12));
    }
  }
}

TEST_CASE("identical seeds give identical trees; lambda zero reduces to rrt star") {
  GenerateOptions o;
  o.count = 3;
  o.width = 160;
  o.resolution = 0.05;
  o.height = 120;
  o.seed = 4;
  for (const Scenario& s : generate_scenarios(o)) {
    const World w(s);
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      PlannerConfig c;
      c.seed = seed;
      c.max_iterations = 800;
      const PlanResult a = plan_rrt_star(w, c);
      CHECK(same_tree(a.tree, plan_rrt_star(w, c).tree));
      PlannerConfig z = c;
      z.cost_weight = 0.0;
      CHECK(same_tree(a.tree, plan_gan_rrt_star(w, GanPair::create(seed + 100), z).tree));
      c.cost_weight = 4.0;
      CHECK_FALSE(same_tree(a.tree, plan_gan_rrt_star(w, GanPair::create(seed + 100), c).tree));
    }
  }
}

TEST_CASE("a saturated discriminator gate rejects every node") {
  const Scenario s = wall_scenario();
  GanPair p = GanPair::zeros();
  p.discriminator.params.biases.back()[0] = -20.0;
  PlannerConfig c;
  c.max_iterations = 300;
  c.discriminator_gate = 0.99;
  const PlanResult r = plan_gan_rrt_star(s, p, c);
  CHECK_FALSE(r.success());
  CHECK(r.tree.nodes.size() == 1);
}

TEST_CASE("gan rrt star steers away from a pedestrian's front zone") {
  // Pedestrian faces the robot in the middle of the corridor; a generator
  // that prices the front zone should keep the path out of it.
  Scenario s = open_scenario(120, 80, 0.05, {0.5, 2.0}, {5.5, 2.0});
  s.pedestrians.push_back({3.6, 2.0, -3.14159, 0.0, 0.3});
  GanPair p = GanPair::zeros();
  p.generator.params.weights[0].assign(50, 0.0);
  for (int h = 0; h < 10; ++h) p.generator.params.weights[0][static_cast<std::size_t>(h * 5 + 2)] = 8.0;
  p.generator.params.weights[1].assign(10, 1.0);
  p.generator.params.biases[1][0] = -6.0;
  const World w(s);
  double gan_max = 0.0, rrt_max = 0.0;
  int better = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlannerConfig c;
    c.seed = seed;
    c.cost_weight = 10.0;
    const PlanResult g = plan_gan_rrt_star(w, p, c);
    const PlanResult r = plan_rrt_star(w, c);
    REQUIRE(g.success());
    REQUIRE(r.success());
    auto max_front = [&](const Path& path) {
      double m = 0.0;
      for (Vec2 q : resample_by_spacing(path.points, 0.05)) m = std::max(m, w.features_at(q)[2]);
      return m;
    };
    const double gm = max_front(*g.path), rm = max_front(*r.path);
    gan_max += gm;
    rrt_max += rm;
    if (gm < rm) ++better;
  }
  CHECK(gan_max < rrt_max);
  CHECK(better >= 14);
}

TEST_CASE("planner config validation and kind parsing") {
  PlannerConfig c;
  c.discriminator_gate = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.cost_weight = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(planner_kind_from_string("ganrrtstar") == PlannerKind::gan_rrt_star);
  CHECK_THROWS_AS(planner_kind_from_string("astar"), Error);
  GanPair bad = GanPair::zeros();
  bad.generator = Mlp::zeros({4, 10, 1});
  CHECK_THROWS_AS(plan_gan_rrt_star(wall_scenario(), bad, PlannerConfig{}), Error);
}

TEST_CASE("extract_solution") {
  PlanTree t;
  t.nodes.push_back({{0, 0}, -1, 0.0, 1.0});
  CHECK_FALSE(extract_solution(t, "x", PathSource::rrt).has_value());
  t.nodes.push_back({{1, 0}, 0, 1.0, 1.0});
  t.goal_node = 1;
  const auto p = extract_solution(t, "x", PathSource::rrt_star);
  REQUIRE(p.has_value());
  CHECK(p->points.size() == 2);
  CHECK(p->scenario_id == "x");
  CHECK(p->source == PathSource::rrt_star);
}
