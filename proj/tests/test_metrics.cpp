#include "doctest.h"
#include "helpers.hpp"
#include "homotopy_oracle.hpp"
#include "socnav/error.hpp"
#include "socnav/metrics.hpp"
#include "socnav/oracle.hpp"

using namespace socnav;
using socnav::test::fill_box;
using socnav::test::make_path;
using socnav::test::open_scenario;

namespace {

// 6 m x 4 m map with one block in the middle: cells 50..69 x 30..49.
Scenario block_scenario() {
  Scenario s = open_scenario(120, 80, 0.05, {0.5, 2.0}, {5.5, 2.0});
  fill_box(s.grid, 50, 30, 69, 49);
  return s;
}

Path rotate(const Path& p, double a, Vec2 shift) {
  Path out = p;
  for (Vec2& q : out.points) q = Vec2{std::cos(a) * q.x - std::sin(a) * q.y, std::sin(a) * q.x + std::cos(a) * q.y} + shift;
  return out;
}

}  // namespace

TEST_CASE("reduce_word cancels adjacent inverse pairs to a fixed point") {
  CHECK(reduce_word({1, -1}).empty());
  CHECK(reduce_word({2, 1, -1, -2, 3}) == std::vector<int>{3});
  CHECK(reduce_word({1, 1, -2}) == std::vector<int>{1, 1, -2});
  CHECK(reduce_word({1, 2, -2, 3, -3, -1, 1}) == std::vector<int>{1});
}

TEST_CASE("rays: components in scanline order, then pedestrians") {
  Scenario s = open_scenario(100, 80, 0.05, {0.3, 0.3}, {4.5, 3.5});
  fill_box(s.grid, 60, 10, 64, 14);  // lower right
  fill_box(s.grid, 10, 50, 12, 52);  // upper left
  s.pedestrians.push_back({3.0, 3.0, 0.0, 0.0, 0.3});
  s.pedestrians.push_back({2.0, 1.0, 0.0, 0.0, 0.3});
  const auto rays = homotopy_rays(s);
  REQUIRE(rays.size() == 4);
  CHECK(rays[0].origin == s.grid.center(62, 12));
  CHECK(rays[1].origin == s.grid.center(11, 51));
  CHECK(rays[2].origin == Vec2{2.0, 1.0});
  CHECK(rays[3].origin == Vec2{3.0, 3.0});
  CHECK(rays[3].id == 4);
  CHECK(rays[3].pedestrian);
  CHECK(homotopy_rays(s, false).size() == 2);
}

TEST_CASE("h_signature examples on a single block") {
  const Scenario s = block_scenario();
  const Path straight_below = make_path(s, {{0.5, 2.0}, {0.5, 1.0}, {5.5, 1.0}, {5.5, 2.0}});
  const Path above = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.5, 2.0}});
  CHECK(h_signature(s, straight_below).word.empty());
  CHECK(h_signature(s, above).word == std::vector<int>{1});
  CHECK_FALSE(same_homotopy(s, straight_below, above));
  CHECK(same_homotopy(s, above, above));

  // Loop once around the block and then go to the goal below it.
  const Path loop = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.5, 1.0}, {1.0, 1.0}, {1.0, 3.2},
                                  {5.3, 3.2}, {5.3, 0.8}, {5.5, 2.0}});
  CHECK(h_signature(s, loop).word == std::vector<int>{1, 1});
  CHECK_FALSE(same_homotopy(s, loop, above));

  const Path outside = make_path(s, {{0.5, 2.0}, {-0.1, 2.0}, {5.5, 2.0}});
  CHECK_THROWS_AS(h_signature(s, outside), Error);
}

TEST_CASE("opposite sides of a pedestrian differ, same side agree") {
  Scenario s = open_scenario(120, 80, 0.05, {0.5, 2.0}, {5.5, 2.0});
  s.pedestrians.push_back({3.0, 2.0, 0.0, 0.0, 0.3});
  const Path up1 = make_path(s, {{0.5, 2.0}, {3.0, 2.6}, {5.5, 2.0}});
  const Path up2 = make_path(s, {{0.5, 2.0}, {2.0, 3.0}, {4.0, 3.0}, {5.5, 2.0}});
  const Path down1 = make_path(s, {{0.5, 2.0}, {3.0, 1.4}, {5.5, 2.0}});
  const Path down2 = make_path(s, {{0.5, 2.0}, {2.5, 0.5}, {3.5, 1.0}, {5.5, 2.0}});
  CHECK(same_homotopy(s, up1, up2));
  CHECK(same_homotopy(s, down1, down2));
  CHECK_FALSE(same_homotopy(s, up1, down1));
  CHECK_FALSE(same_homotopy(s, up2, down2));
  CHECK(same_homotopy(s, up1, down1, false));
  CHECK(h_signature(s, up1).word != h_signature(s, down1).word);
}

TEST_CASE("half-open rule: touching a ray from one side contributes nothing") {
  const Scenario s = block_scenario();
  const double rx = homotopy_rays(s)[0].origin.x;
  const Path touch = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {rx, 3.0}, {0.8, 3.2}, {0.5, 1.0}, {5.5, 1.0}, {5.5, 2.0}});
  CHECK(h_signature(s, touch).word.empty());
  const Path via = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {rx, 3.0}, {5.5, 3.0}, {5.5, 2.0}});
  CHECK(h_signature(s, via).word == std::vector<int>{1});
}

TEST_CASE("endpoint tolerance and path closure") {
  const Scenario s = block_scenario();
  const Path a = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.45, 2.1}});
  const Path b = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.5, 2.0}});
  CHECK(same_homotopy(s, a, b));
  const Path far = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.0, 3.0}});
  CHECK_THROWS_AS(same_homotopy(s, far, b), Error);
}

TEST_CASE("jitter keeps the class; same_homotopy is an equivalence on generated sets") {
  GenerateOptions o;
  o.count = 3;
  o.width = 160;
  o.resolution = 0.05;
  o.height = 120;
  o.seed = 77;
  Rng rng(1);
  for (const Scenario& s : generate_scenarios(o)) {
    const World w(s);
    std::vector<Path> paths;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      PlannerConfig c;
      c.seed = seed;
      c.max_iterations = 1500;
      const PlanResult r = plan_rrt_star(w, c);
      if (r.success()) paths.push_back(*r.path);
    }
    paths.push_back(oracle_demo(w));
    for (const Path& p : paths) {
      Path j = p;
      for (int tries = 0; tries < 50; ++tries) {
        j = p;
        for (std::size_t i = 1; i + 1 < j.points.size(); ++i)
          j.points[i] = j.points[i] + Vec2{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)};
        bool ok = true;
        for (std::size_t i = 1; i < j.points.size() && ok; ++i) ok = w.checker.segment_free(j.points[i - 1], j.points[i]);
        if (ok) break;
      }
      bool free = true;
      for (std::size_t i = 1; i < j.points.size() && free; ++i) free = w.checker.segment_free(j.points[i - 1], j.points[i]);
      if (free) CHECK(same_homotopy(s, p, j));
    }
    for (const Path& a : paths) {
      CHECK(same_homotopy(s, a, a));
      for (const Path& b : paths) {
        CHECK(same_homotopy(s, a, b) == same_homotopy(s, b, a));
        for (const Path& c : paths)
          if (same_homotopy(s, a, b) && same_homotopy(s, b, c)) CHECK(same_homotopy(s, a, c));
      }
    }
  }
}

TEST_CASE("same_homotopy agrees with the deformation oracle on small lattices") {
  int pairs = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto lc = test::random_lattice_case(seed, 9, 8);
    const auto rays = homotopy_rays(lc.scenario);
    std::vector<std::string> keys;
    for (const auto& w : lc.walks) keys.push_back(test::canonical_form(lc.scenario.grid, w));
    for (std::size_t i = 0; i < lc.walks.size(); ++i) {
      for (std::size_t j = i + 1; j < lc.walks.size(); ++j) {
        const bool brute = keys[i] == keys[j];
        const bool fast = same_homotopy(lc.scenario, rays, test::walk_to_path(lc.scenario, lc.walks[i]),
                                        test::walk_to_path(lc.scenario, lc.walks[j]));
        CHECK(brute == fast);
        ++pairs;
      }
    }
  }
  CHECK(pairs >= 30);
}

TEST_CASE("dissimilarity examples") {
  const Scenario s = block_scenario();
  const Path a = make_path(s, {{0.5, 0.5}, {4.5, 0.5}});
  const Path b = make_path(s, {{0.5, 0.8}, {4.5, 0.8}});
  CHECK(dissimilarity(a, a) == 0.0);
  // Each of the 99 trapezoids is h * L / 99; their sum divided by 99.
  CHECK(dissimilarity(a, b) == doctest::Approx(0.3 * 4.0 / 99.0).epsilon(1e-12));
  const Path bent = make_path(s, {{0.5, 0.5}, {2.0, 1.7}, {4.5, 0.5}});
  CHECK(dissimilarity(bent, a) >= 0.0);
  CHECK(dissimilarity(bent, a, true) ==
        doctest::Approx(0.5 * (dissimilarity(bent, a) + dissimilarity(a, bent))).epsilon(1e-12));
  CHECK(dissimilarity(rotate(bent, 0.7, {1.0, -2.0}), rotate(a, 0.7, {1.0, -2.0})) ==
        doctest::Approx(dissimilarity(bent, a)).epsilon(1e-9));
  // Zero when the resampled first path lies on the second.
  const Path sub = make_path(s, {{1.0, 0.5}, {3.0, 0.5}});
  CHECK(dissimilarity(sub, a) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(dissimilarity(a, sub) > 0.0);
  CHECK_THROWS_AS(dissimilarity(make_path(s, {{0.5, 0.5}}), a), Error);
}

TEST_CASE("feature_difference examples") {
  CHECK(feature_difference({{0.5, 0.1, 0.2, 0.0, 0.0}}, {{0.0, 0.1, 0.2, 0.0, 0.0}}) == doctest::Approx(0.1));
  const std::vector<FeatureVector> d{{0.1, 0.2, 0.3, 0.4, 0.5}, {0.9, 0.8, 0.7, 0.6, 0.5}};
  const std::vector<FeatureVector> p{{0.0, 0.2, 0.1, 0.4, 1.0}, {0.9, 0.5, 0.7, 0.6, 0.5}};
  // Straight reimplementation of the formula.
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < 5; ++j) sum += std::abs(d[i][j] - p[i][j]);
  CHECK(feature_difference(d, p) == doctest::Approx(sum / 10.0).epsilon(1e-15));
  CHECK(feature_difference(d, d) == 0.0);
  CHECK_THROWS_AS(feature_difference(d, {p[0]}), Error);
}

TEST_CASE("homotopy_rate arithmetic and identity") {
  const Scenario s = block_scenario();
  const Path above = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.5, 2.0}});
  const Path below = make_path(s, {{0.5, 2.0}, {0.5, 1.0}, {5.5, 1.0}, {5.5, 2.0}});
  std::vector<const Scenario*> ss(25, &s);
  std::vector<Path> demos(25, above), plans(25, above);
  CHECK(homotopy_rate(ss, demos, plans) == 1.0);
  for (int i = 0; i < 6; ++i) plans[static_cast<std::size_t>(i * 4)] = below;
  CHECK(homotopy_rate(ss, demos, plans) == doctest::Approx(0.76));
}

TEST_CASE("evaluate_pair and aggregate") {
  const Scenario s = block_scenario();
  const World w(s);
  const Path above = make_path(s, {{0.5, 2.0}, {0.5, 3.0}, {5.5, 3.0}, {5.5, 2.0}});
  const Path below = make_path(s, {{0.5, 2.0}, {0.5, 1.0}, {5.5, 1.0}, {5.5, 2.0}});
  const MetricReport same = evaluate_pair(w, above, above);
  CHECK(same.homotopic);
  CHECK(same.dissimilarity == 0.0);
  CHECK(same.feature_difference == 0.0);
  CHECK(same.path_length_demo == doctest::Approx(7.0));
  const MetricReport diff = evaluate_pair(w, above, below);
  CHECK_FALSE(diff.homotopic);
  CHECK(diff.dissimilarity > 0.0);
  const MetricAggregate agg = aggregate({same, diff}, 2);
  CHECK(agg.homotopy_rate == 0.25);
  CHECK(agg.mean_dissimilarity == doctest::Approx(diff.dissimilarity / 2));
  CHECK(agg.feature_difference == doctest::Approx(diff.feature_difference / 2));
}
