#include "socnav/irl.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/error.hpp"
#include "socnav/rng.hpp"

namespace socnav {

void TrainConfig::validate() const {
  const auto positive = [](int v, const char* name) {
    if (v < 1) throw Error(errc::invalid_config, name, "must be >= 1");
  };
  positive(epochs_max, "epochs_max");
  positive(repetitions, "repetitions");
  positive(minibatch, "minibatch");
  positive(d_steps_per_g_step, "d_steps_per_g_step");
  positive(pretrain_samples, "pretrain_samples");
  positive(patience, "patience");
  if (pretrain_passes < 0) throw Error(errc::invalid_config, "pretrain_passes", "must be >= 0");
  const auto rate = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(errc::invalid_config, name, "must be finite and >= 0");
  };
  rate(lr_g, "lr_g");
  rate(lr_d, "lr_d");
  rate(pretrain_lr, "pretrain_lr");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(errc::invalid_config, "momentum", "must lie in [0, 1)");
  if (!(resample_spacing > 0.0)) throw Error(errc::invalid_config, "resample_spacing", "must be > 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw Error(errc::invalid_config, "val_fraction", "must lie in (0, 1)");
}

double pretrain_target(const FeatureVector& f) {
  const double t = 0.2 * f[0] + 0.2 * (1.0 - f[1]) + 0.2 * (f[2] + f[3] + f[4]);
  return std::clamp(t, 0.0, 1.0);
}

std::vector<FeatureVector> collect_nodes(const World& world, const Path& path, double spacing) {
  std::vector<FeatureVector> out;
  for (const Vec2& p : resample_by_spacing(path.points, spacing)) out.push_back(world.features_at(p));
  return out;
}

std::vector<FeatureVector> sample_free_features(const std::vector<const World*>& worlds, int count, std::uint64_t seed) {
  if (worlds.empty()) throw Error(errc::empty_batch, "scenarios", "no scenarios to sample from");
  Rng rng(seed);
  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const World& w = *worlds[rng.below(worlds.size())];
    const Vec2 p{rng.uniform(0.0, w.scenario.grid.width_m()), rng.uniform(0.0, w.scenario.grid.height_m())};
    if (w.checker.is_free(p)) out.push_back(w.features_at(p));
  }
  return out;
}

namespace {

double regression_mse(const Mlp& g, const std::vector<FeatureVector>& x, const std::vector<double>& t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = forward_scalar(g, x[i]) - t[i];
    sum += e * e;
  }
  return sum / static_cast<double>(x.size());
}

struct Rollout {
  std::vector<FeatureVector> nodes;
  int rollouts = 0;
  int failures = 0;
  int homotopic = 0;
};

Rollout rollout(const GanPair& pair, const std::vector<const World*>& worlds, const std::vector<Path>& demos,
                const std::vector<std::vector<HomotopyRay>>& rays, int repetitions, const TrainConfig& config,
                const PlannerConfig& planner, std::uint64_t seed) {
  Rollout out;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    for (int r = 0; r < repetitions; ++r) {
      PlannerConfig pc = planner;
      pc.seed = derive_seed(seed, i, static_cast<std::uint64_t>(r));
      const PlanResult res = plan_gan_rrt_star(*worlds[i], pair, pc);
      ++out.rollouts;
      if (!res.success()) {
        ++out.failures;
        continue;
      }
      if (same_homotopy(worlds[i]->scenario, rays[i], demos[i], *res.path)) ++out.homotopic;
      if (config.tree_nodes) {
        for (const TreeNode& n : res.tree.nodes) out.nodes.push_back(worlds[i]->features_at(n.point));
      } else {
        const auto nodes = collect_nodes(*worlds[i], *res.path, config.resample_spacing);
        out.nodes.insert(out.nodes.end(), nodes.begin(), nodes.end());
      }
    }
  }
  return out;
}

struct PassLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

// Minibatch pass over the planned nodes; demo nodes are cycled to balance
// each batch. update_g = false trains only the discriminator.
PassLosses adversarial_pass(GanPair& pair, const std::vector<FeatureVector>& real,
                            const std::vector<FeatureVector>& fake, const TrainConfig& config, bool update_g,
                            std::uint64_t seed) {
  PassLosses out;
  if (real.empty() || fake.empty()) return out;
  Rng rng(seed);
  std::vector<std::size_t> fake_order(fake.size()), real_order(real.size());
  for (std::size_t i = 0; i < fake.size(); ++i) fake_order[i] = i;
  for (std::size_t i = 0; i < real.size(); ++i) real_order[i] = i;
  rng.shuffle(fake_order);
  rng.shuffle(real_order);

  const std::size_t mb = static_cast<std::size_t>(config.minibatch);
  std::size_t real_at = 0;
  int batches = 0;
  FeatureBatch fb, rb;
  for (std::size_t start = 0; start < fake.size(); start += mb) {
    fb.clear();
    rb.clear();
    for (std::size_t k = start; k < std::min(fake.size(), start + mb); ++k) {
      fb.push_back(fake[fake_order[k]]);
      rb.push_back(real[real_order[real_at]]);
      real_at = (real_at + 1) % real.size();
    }
    for (int s = 0; s < config.d_steps_per_g_step; ++s) {
      const LossAndGrad d = d_loss_grad(pair, rb, fb);
      if (s == 0) out.d_loss += d.loss;
      sgd_step(pair.discriminator, pair.d_velocity, d.grad, config.lr_d, config.momentum);
    }
    if (update_g) {
      const LossAndGrad g = g_loss_grad(pair, fb, config.generator_loss);
      out.g_loss += g.loss;
      sgd_step(pair.generator, pair.g_velocity, g.grad, config.lr_g, config.momentum);
    }
    ++batches;
  }
  out.d_loss /= batches;
  out.g_loss /= batches;
  return out;
}

std::vector<std::vector<HomotopyRay>> rays_for(const std::vector<const World*>& worlds) {
  std::vector<std::vector<HomotopyRay>> out;
  for (const World* w : worlds) out.push_back(homotopy_rays(w->scenario));
  return out;
}

std::vector<FeatureVector> demo_nodes(const std::vector<const World*>& worlds, const std::vector<Path>& demos,
                                      double spacing) {
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    const auto nodes = collect_nodes(*worlds[i], demos[i], spacing);
    out.insert(out.end(), nodes.begin(), nodes.end());
  }
  return out;
}

void check_demos(const std::vector<const World*>& worlds, const std::vector<Path>& demos, const char* field) {
  if (worlds.empty()) throw Error(errc::empty_batch, field, "no scenarios");
  if (worlds.size() != demos.size()) throw Error(errc::scenario_mismatch, field, "need exactly one demo per scenario");
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    if (worlds[i]->scenario.id != demos[i].scenario_id)
      throw Error(errc::scenario_mismatch, field,
                  "demo '" + demos[i].scenario_id + "' paired with scenario '" + worlds[i]->scenario.id + "'");
  }
}

}  // namespace

PretrainSummary pretrain(GanPair& pair, const std::vector<const World*>& worlds, const std::vector<Path>& demos,
                         const TrainConfig& config, const PlannerConfig& planner) {
  config.validate();
  check_demos(worlds, demos, "train");
  PretrainSummary out;

  const std::vector<FeatureVector> x = sample_free_features(worlds, config.pretrain_samples, derive_seed(config.seed, 1));
  std::vector<double> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = pretrain_target(x[i]);

  Rng rng(derive_seed(config.seed, 2));
  Parameters velocity = Parameters::zeros_like(pair.generator.layers);
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) order[i] = i;
  const std::size_t mb = static_cast<std::size_t>(config.minibatch);
  out.mse = regression_mse(pair.generator, x, t);
  while (out.passes < config.pretrain_passes && out.mse >= 1e-3) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < x.size(); start += mb) {
      const std::size_t end = std::min(x.size(), start + mb);
      Parameters grad = Parameters::zeros_like(pair.generator.layers);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const ForwardCache cache = forward_cached(pair.generator, x[i]);
        const double up = 2.0 * (cache.output()[0] - t[i]) / static_cast<double>(end - start);
        grad.add_scaled(backward(pair.generator, cache, std::span<const double>(&up, 1)).params, 1.0);
      }
      sgd_step(pair.generator, velocity, grad, config.pretrain_lr, config.momentum);
    }
    ++out.passes;
    out.mse = regression_mse(pair.generator, x, t);
  }
  if (out.mse >= 1e-2) out.warning = "generator regression stopped at mse " + std::to_string(out.mse);

  const auto rays = rays_for(worlds);
  const Rollout ro = rollout(pair, worlds, demos, rays, 1, config, planner, derive_seed(config.seed, 3));
  const PassLosses losses = adversarial_pass(pair, demo_nodes(worlds, demos, config.resample_spacing), ro.nodes,
                                             config, false, derive_seed(config.seed, 4));
  out.d_loss = losses.d_loss;
  pair.g_velocity = Parameters::zeros_like(pair.generator.layers);
  return out;
}

PlannerScore score_planner(const GanPair& pair, const std::vector<const World*>& worlds,
                           const std::vector<Path>& demos, const PlannerConfig& planner, std::uint64_t seed) {
  check_demos(worlds, demos, "validation");
  PlannerScore out;
  int hits = 0;
  int solved = 0;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    PlannerConfig pc = planner;
    pc.seed = derive_seed(seed, i);
    const PlanResult res = plan_gan_rrt_star(*worlds[i], pair, pc);
    if (!res.success()) {
      ++out.failures;
      continue;
    }
    ++solved;
    if (same_homotopy(worlds[i]->scenario, demos[i], *res.path)) ++hits;
    out.mean_dissimilarity += dissimilarity(demos[i], *res.path);
  }
  out.homotopy_rate = static_cast<double>(hits) / static_cast<double>(worlds.size());
  if (solved > 0) out.mean_dissimilarity /= solved;
  return out;
}

TrainReport train(GanPair& pair, const std::vector<const World*>& train_worlds, const std::vector<Path>& train_demos,
                  const std::vector<const World*>& val_worlds, const std::vector<Path>& val_demos,
                  const TrainConfig& config, const PlannerConfig& planner, const TrainHooks& hooks) {
  config.validate();
  check_demos(train_worlds, train_demos, "train");
  check_demos(val_worlds, val_demos, "validation");
  TrainReport report;
  const auto rays = rays_for(train_worlds);
  const std::vector<FeatureVector> real = demo_nodes(train_worlds, train_demos, config.resample_spacing);
  const std::uint64_t val_seed = derive_seed(config.seed, 5);

  const PlannerScore base = score_planner(pair, val_worlds, val_demos, planner, val_seed);
  report.baseline_val_homotopy_rate = base.homotopy_rate;
  report.baseline_val_dissimilarity = base.mean_dissimilarity;
  GanPair best = pair;
  double best_rate = base.homotopy_rate;
  double best_dis = base.mean_dissimilarity;
  int stale = 0;
  std::vector<FeatureVector> fake;

  report.stopping_reason = "epochs_max";
  for (int epoch = 1; epoch <= config.epochs_max; ++epoch) {
    if (hooks.cancelled && hooks.cancelled()) {
      report.stopping_reason = "cancelled";
      break;
    }
    const std::uint64_t epoch_seed = derive_seed(config.seed, 6, static_cast<std::uint64_t>(epoch));
    Rollout ro = rollout(pair, train_worlds, train_demos, rays, config.repetitions, config, planner, epoch_seed);
    if (2 * ro.failures > ro.rollouts) {
      throw Error(errc::training_aborted, "epoch " + std::to_string(epoch),
                  std::to_string(ro.failures) + " of " + std::to_string(ro.rollouts) + " planner runs failed");
    }
    if (!config.accumulate) fake.clear();
    fake.insert(fake.end(), ro.nodes.begin(), ro.nodes.end());
    const PassLosses losses = adversarial_pass(pair, real, fake, config, true, derive_seed(epoch_seed, 7));

    const PlannerScore val = score_planner(pair, val_worlds, val_demos, planner, val_seed);
    EpochRow row;
    row.epoch = epoch;
    row.d_loss = losses.d_loss;
    row.g_loss = losses.g_loss;
    row.train_homotopy_rate = static_cast<double>(ro.homotopic) / static_cast<double>(ro.rollouts);
    row.val_homotopy_rate = val.homotopy_rate;
    row.val_dissimilarity = val.mean_dissimilarity;
    row.rollouts = ro.rollouts;
    row.failures = ro.failures;
    row.improved = val.homotopy_rate > best_rate || (val.homotopy_rate == best_rate && val.mean_dissimilarity < best_dis);
    if (row.improved) {
      best = pair;
      best_rate = val.homotopy_rate;
      best_dis = val.mean_dissimilarity;
      report.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    report.epochs.push_back(row);
    report.stopping_epoch = epoch;
    if (hooks.on_epoch) hooks.on_epoch(row, pair);
    if (stale >= config.patience) {
      report.stopping_reason = "patience";
      break;
    }
  }
  pair = best;
  pair.reset_momentum();
  return report;
}

}  // namespace socnav
