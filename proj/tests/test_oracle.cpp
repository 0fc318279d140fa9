#include "doctest.h"
#include "helpers.hpp"
#include "socnav/error.hpp"
#include "socnav/grid_search.hpp"
#include "socnav/oracle.hpp"

using namespace socnav;
using socnav::test::fill_box;
using socnav::test::open_scenario;

namespace {

double max_front(const World& w, const Path& p) {
  double m = 0.0;
  for (Vec2 q : resample_by_spacing(p.points, 0.05)) m = std::max(m, w.features_at(q)[2]);
  return m;
}

}  // namespace

TEST_CASE("empty map demo is a straight line") {
  const Scenario s = open_scenario(150, 100, 0.04, {0.5, 0.7}, {5.3, 3.1});
  const Path p = oracle_demo(s);
  CHECK(p.source == PathSource::demo_oracle);
  CHECK(p.length() <= 1.02 * distance(s.start, s.goal));
  CHECK_NOTHROW(validate_path(s, p));
}

TEST_CASE("zero weights reduce to a grid shortest path") {
  Scenario s = open_scenario(60, 50, 0.05, {0.4, 0.4}, {2.6, 2.1});
  fill_box(s.grid, 20, 0, 24, 35);
  const World w(s);
  OracleConfig c;
  c.w_clearance = 0.0;
  c.w_pedestrian = 0.0;
  c.smooth = false;
  const Path p = oracle_demo(w, c);
  const auto src = anchor_cell(w.checker, s.start);
  const auto dst = anchor_cell(w.checker, s.goal);
  const auto plain = grid_dijkstra(w.checker, *src, *dst);
  REQUIRE(plain.has_value());
  const double inner = p.length() - distance(p.points[0], p.points[1]) -
                       distance(p.points[p.points.size() - 2], p.points.back());
  CHECK(inner == doctest::Approx(plain->cost).epsilon(1e-9));
  for (double d : social_density(w, c)) CHECK(d == 1.0);
}

TEST_CASE("demo detours around a pedestrian facing the corridor") {
  Scenario s = open_scenario(120, 80, 0.05, {0.5, 2.0}, {5.5, 2.0});
  s.pedestrians.push_back({3.6, 2.0, -3.14159, 0.0, 0.3});
  const World w(s);
  OracleConfig blind;
  blind.w_pedestrian = 0.0;
  const Path social = oracle_demo(w);
  const Path shortest = oracle_demo(w, blind);
  CHECK(max_front(w, social) < max_front(w, shortest));
  CHECK_NOTHROW(validate_path(s, social));
}

TEST_CASE("smoothing never raises the social cost and stays collision-free") {
  GenerateOptions o;
  o.count = 4;
  o.width = 120;
  o.resolution = 0.05;
  o.height = 100;
  o.seed = 31;
  for (const Scenario& s : generate_scenarios(o)) {
    const World w(s);
    OracleConfig raw;
    raw.smooth = false;
    const Path rough = oracle_demo(w, raw);
    const Path smooth = oracle_demo(w);
    const auto density = social_density(w, OracleConfig{});
    CHECK(social_cost(w, density, smooth.points) <= social_cost(w, density, rough.points) + 1e-9);
    CHECK(smooth.points.size() <= rough.points.size());
    CHECK_NOTHROW(validate_path(s, smooth));
    for (std::size_t i = 1; i < smooth.points.size(); ++i)
      CHECK(w.checker.segment_free(smooth.points[i - 1], smooth.points[i]));
    CHECK(oracle_demo(w) == smooth);
  }
}

TEST_CASE("dijkstra beats 1000 random feasible grid walks") {
  Scenario s = open_scenario(24, 20, 0.1, {0.35, 0.35}, {2.05, 1.65});
  s.robot_radius = 0.05;
  fill_box(s.grid, 9, 0, 11, 12);
  s.pedestrians.push_back({1.5, 1.5, 0.0, 0.0, 0.05});
  const World w(s);
  const auto density = social_density(w, OracleConfig{});
  const auto src = anchor_cell(w.checker, s.start);
  const auto dst = anchor_cell(w.checker, s.goal);
  const auto best = grid_dijkstra(w.checker, *src, *dst, density);
  REQUIRE(best.has_value());
  Rng rng(17);
  int walks = 0;
  while (walks < 1000) {
    Cell c = *src;
    double cost = 0.0;
    for (int step = 0; step < 400 && !(c == *dst); ++step) {
      // Biased toward the target so that most walks arrive.
      int dx = rng.uniform_int(-1, 1), dy = rng.uniform_int(-1, 1);
      if (rng.uniform() < 0.5) {
        dx = (dst->x > c.x) - (dst->x < c.x);
        dy = (dst->y > c.y) - (dst->y < c.y);
      }
      if (dx == 0 && dy == 0) continue;
      const Cell n{c.x + dx, c.y + dy};
      if (!s.grid.in_bounds(n.x, n.y) || !w.checker.segment_free(s.grid.center(c), s.grid.center(n))) continue;
      cost += distance(s.grid.center(c), s.grid.center(n)) * density[s.grid.index(n.x, n.y)];
      c = n;
    }
    if (!(c == *dst)) continue;
    ++walks;
    CHECK(best->cost <= cost + 1e-9);
  }
}

TEST_CASE("unreachable goal raises infeasible naming the scenario") {
  Scenario s = open_scenario(80, 80, 0.05, {0.5, 0.5}, {3.0, 3.0});
  s.id = "boxed";
  fill_box(s.grid, 50, 50, 79, 52);
  fill_box(s.grid, 50, 50, 52, 79);
  try {
    oracle_demo(s);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == errc::infeasible);
    CHECK(e.field() == "scenario boxed");
  }
  OracleConfig bad;
  bad.connectivity = 4;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("oracle demo frozen on a generated scenario") {
  GenerateOptions o;
  o.count = 1;
  o.seed = 2024;
  const Scenario s = generate_scenarios(o)[0];
  const Path p = oracle_demo(s);
  REQUIRE(p.points.size() == 4);
  CHECK(p.points[1].x == doctest::Approx(2.73).epsilon(1e-12));
  CHECK(p.points[1].y == doctest::Approx(3.89).epsilon(1e-12));
  CHECK(p.points[2].x == doctest::Approx(0.63).epsilon(1e-12));
  CHECK(p.points[2].y == doctest::Approx(3.91).epsilon(1e-12));
  CHECK(p.length() == doctest::Approx(4.8928675088661215).epsilon(1e-12));
}
