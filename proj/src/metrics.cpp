#include "socnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "socnav/error.hpp"

namespace socnav {

std::vector<HomotopyRay> homotopy_rays(const Scenario& scenario, bool include_pedestrians) {
  const OccupancyGrid& g = scenario.grid;
  const std::size_t n = g.cells.size();
  std::vector<std::uint8_t> free_site(n);
  for (std::size_t i = 0; i < n; ++i) free_site[i] = g.cells[i] ? 0 : 1;
  const DistanceField to_free = DistanceField::build_from_sites(g.width, g.height, g.resolution, free_site);

  std::vector<int> label(n, -1);
  std::vector<Cell> reps;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!g.cells[seed] || label[seed] >= 0) continue;
    const int comp = static_cast<int>(reps.size());
    std::size_t best = seed;
    double best_d = -1.0;
    label[seed] = comp;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int cx = static_cast<int>(i % g.width);
      const int cy = static_cast<int>(i / g.width);
      const double d = to_free.at(cx, cy);
      if (d > best_d || (d == best_d && i < best)) {
        best_d = d;
        best = i;
      }
      const int nx[4] = {cx - 1, cx + 1, cx, cx};
      const int ny[4] = {cy, cy, cy - 1, cy + 1};
      for (int k = 0; k < 4; ++k) {
        if (!g.in_bounds(nx[k], ny[k])) continue;
        const std::size_t j = g.index(nx[k], ny[k]);
        if (!g.cells[j] || label[j] >= 0) continue;
        label[j] = comp;
        stack.push_back(j);
      }
    }
    reps.push_back({static_cast<int>(best % g.width), static_cast<int>(best / g.width)});
  }

  const auto scanline = [](Vec2 a, Vec2 b) { return a.y < b.y || (a.y == b.y && a.x < b.x); };
  std::vector<Vec2> obstacle_origins;
  for (const Cell& c : reps) obstacle_origins.push_back(g.center(c));
  std::sort(obstacle_origins.begin(), obstacle_origins.end(), scanline);
  std::vector<Vec2> ped_origins;
  if (include_pedestrians) {
    for (const Pedestrian& p : scenario.pedestrians) ped_origins.push_back(p.position());
    std::stable_sort(ped_origins.begin(), ped_origins.end(), scanline);
  }

  std::vector<HomotopyRay> rays;
  for (const Vec2& o : obstacle_origins) rays.push_back({static_cast<int>(rays.size()) + 1, o, false});
  for (const Vec2& o : ped_origins) rays.push_back({static_cast<int>(rays.size()) + 1, o, true});
  return rays;
}

std::vector<int> reduce_word(const std::vector<int>& word) {
  std::vector<int> out;
  for (int w : word) {
    if (!out.empty() && out.back() == -w) {
      out.pop_back();
    } else {
      out.push_back(w);
    }
  }
  return out;
}

HSignature h_signature(const Scenario& scenario, const std::vector<HomotopyRay>& rays, const std::vector<Vec2>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2 p = points[i];
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= scenario.grid.width_m() && p.y <= scenario.grid.height_m())) {
      throw Error(errc::out_of_bounds, "points[" + std::to_string(i) + "]", "path leaves the map");
    }
  }
  // Rays sharing an x are treated as infinitesimally offset in id order.
  std::vector<std::size_t> order(rays.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rays[a].origin.x < rays[b].origin.x || (rays[a].origin.x == rays[b].origin.x && rays[a].id < rays[b].id);
  });

  std::vector<int> word;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 p = points[i - 1];
    const Vec2 q = points[i];
    if (p.x == q.x) continue;
    const bool rightward = q.x > p.x;
    for (std::size_t r = 0; r < order.size(); ++r) {
      const HomotopyRay& ray = rays[order[rightward ? r : order.size() - 1 - r]];
      const double x = ray.origin.x;
      // Half-open sides: a vertex on the ray counts as being right of it.
      if ((p.x >= x) == (q.x >= x)) continue;
      const double t = (x - p.x) / (q.x - p.x);
      const double y = p.y + t * (q.y - p.y);
      if (!(y > ray.origin.y)) continue;
      word.push_back(rightward ? ray.id : -ray.id);
    }
  }
  return {reduce_word(word)};
}

HSignature h_signature(const Scenario& scenario, const Path& path, bool include_pedestrians) {
  return h_signature(scenario, homotopy_rays(scenario, include_pedestrians), path.points);
}

namespace {

std::vector<Vec2> closed_points(const Scenario& s, const Path& p, const char* which) {
  if (p.points.empty()) throw Error(errc::endpoint_mismatch, which, "empty path");
  const double tol = s.goal_radius + 1e-9;
  if (distance(p.points.front(), s.start) > tol)
    throw Error(errc::endpoint_mismatch, which, "first point is not at the scenario start");
  if (distance(p.points.back(), s.goal) > tol)
    throw Error(errc::endpoint_mismatch, which, "last point is outside the goal region");
  std::vector<Vec2> pts;
  pts.reserve(p.points.size() + 2);
  if (!(p.points.front() == s.start)) pts.push_back(s.start);
  pts.insert(pts.end(), p.points.begin(), p.points.end());
  if (!(p.points.back() == s.goal)) pts.push_back(s.goal);
  return pts;
}

}  // namespace

bool same_homotopy(const Scenario& scenario, const std::vector<HomotopyRay>& rays, const Path& a, const Path& b) {
  const auto pa = closed_points(scenario, a, "path_a");
  const auto pb = closed_points(scenario, b, "path_b");
  return h_signature(scenario, rays, pa) == h_signature(scenario, rays, pb);
}

bool same_homotopy(const Scenario& scenario, const Path& a, const Path& b, bool include_pedestrians) {
  return same_homotopy(scenario, homotopy_rays(scenario, include_pedestrians), a, b);
}

namespace {

double directed_dissimilarity(const std::vector<Vec2>& one, const std::vector<Vec2>& two) {
  std::vector<std::size_t> seg;
  const std::vector<Vec2> pts = resample_uniform(one, kDissimilaritySamples, &seg);
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // A sample lies exactly on its own segment; projecting it back would only
    // add rounding noise.
    const Vec2 a = one[seg[i]], b = one[std::min(seg[i] + 1, one.size() - 1)];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < two.size() && best > 0.0; ++j) {
      const bool same = (two[j - 1] == a && two[j] == b) || (two[j - 1] == b && two[j] == a);
      best = std::min(best, same ? 0.0 : point_segment_distance(pts[i], two[j - 1], two[j]));
    }
    d[i] = best;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) sum += 0.5 * (d[i - 1] + d[i]) * distance(pts[i - 1], pts[i]);
  return sum / static_cast<double>(kDissimilaritySamples - 1);
}

}  // namespace

double dissimilarity(const Path& path_1, const Path& path_2, bool symmetric) {
  if (path_1.points.size() < 2) throw Error(errc::invariant_violation, "path_1", "needs at least two points");
  if (path_2.points.size() < 2) throw Error(errc::invariant_violation, "path_2", "needs at least two points");
  const double forward = directed_dissimilarity(path_1.points, path_2.points);
  if (!symmetric) return forward;
  return 0.5 * (forward + directed_dissimilarity(path_2.points, path_1.points));
}

FeatureVector path_feature_mean(const World& world, const Path& path, double spacing) {
  const std::vector<Vec2> pts = resample_by_spacing(path.points, spacing);
  FeatureVector mean{};
  for (const Vec2& p : pts) {
    const FeatureVector f = world.features_at(p);
    for (std::size_t j = 0; j < kFeatureCount; ++j) mean[j] += f[j];
  }
  for (double& m : mean) m /= static_cast<double>(pts.size());
  return mean;
}

double feature_difference(const std::vector<FeatureVector>& demo_means, const std::vector<FeatureVector>& plan_means) {
  if (demo_means.size() != plan_means.size())
    throw Error(errc::scenario_mismatch, "plans", "demo and plan counts differ");
  if (demo_means.empty()) throw Error(errc::empty_batch, "scenarios", "no scenarios");
  double sum = 0.0;
  for (std::size_t i = 0; i < demo_means.size(); ++i)
    for (std::size_t j = 0; j < kFeatureCount; ++j) sum += std::abs(demo_means[i][j] - plan_means[i][j]);
  return sum / (static_cast<double>(kFeatureCount) * static_cast<double>(demo_means.size()));
}

namespace {

void check_pairing(std::size_t scenarios, const std::vector<Path>& demos, const std::vector<Path>& plans) {
  if (demos.size() != scenarios || plans.size() != scenarios)
    throw Error(errc::scenario_mismatch, "paths", "need exactly one demo and one plan per scenario");
  for (std::size_t i = 0; i < scenarios; ++i) {
    if (demos[i].scenario_id != plans[i].scenario_id)
      throw Error(errc::scenario_mismatch, "paths[" + std::to_string(i) + "]",
                  "demo '" + demos[i].scenario_id + "' paired with plan '" + plans[i].scenario_id + "'");
  }
}

}  // namespace

double feature_difference(const std::vector<const World*>& worlds, const std::vector<Path>& demos,
                          const std::vector<Path>& plans, double spacing) {
  check_pairing(worlds.size(), demos, plans);
  std::vector<FeatureVector> d, p;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    d.push_back(path_feature_mean(*worlds[i], demos[i], spacing));
    p.push_back(path_feature_mean(*worlds[i], plans[i], spacing));
  }
  return feature_difference(d, p);
}

double homotopy_rate(const std::vector<const Scenario*>& scenarios, const std::vector<Path>& demos,
                     const std::vector<Path>& plans, bool include_pedestrians) {
  check_pairing(scenarios.size(), demos, plans);
  if (scenarios.empty()) throw Error(errc::empty_batch, "scenarios", "no scenarios");
  int hits = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    if (same_homotopy(*scenarios[i], demos[i], plans[i], include_pedestrians)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(scenarios.size());
}

MetricReport evaluate_pair(const World& world, const Path& demo, const Path& plan, const MetricOptions& options) {
  if (demo.scenario_id != plan.scenario_id || demo.scenario_id != world.scenario.id)
    throw Error(errc::scenario_mismatch, "plan", "paths do not belong to scenario '" + world.scenario.id + "'");
  MetricReport r;
  r.scenario_id = world.scenario.id;
  r.dissimilarity = dissimilarity(demo, plan, options.symmetric_dissimilarity);
  r.feature_difference = feature_difference({path_feature_mean(world, demo, options.feature_spacing)},
                                            {path_feature_mean(world, plan, options.feature_spacing)});
  r.homotopic = same_homotopy(world.scenario, demo, plan, options.include_pedestrians);
  r.path_length_demo = demo.length();
  r.path_length_plan = plan.length();
  return r;
}

MetricAggregate aggregate(const std::vector<MetricReport>& reports, int failures) {
  MetricAggregate a;
  if (reports.empty()) return a;
  int hits = 0;
  for (const MetricReport& r : reports) {
    hits += r.homotopic ? 1 : 0;
    a.mean_dissimilarity += r.dissimilarity;
    a.feature_difference += r.feature_difference;
  }
  const double n = static_cast<double>(reports.size());
  a.homotopy_rate = hits / (n + failures);
  a.mean_dissimilarity /= n;
  a.feature_difference /= n;
  return a;
}

}  // namespace socnav
