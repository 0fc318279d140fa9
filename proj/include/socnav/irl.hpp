#pragma once

#include <functional>
#include <string>
#include <vector>

#include "socnav/metrics.hpp"
#include "socnav/planner.hpp"
#include "socnav/tinynet.hpp"

namespace socnav {

struct TrainConfig {
  int epochs_max = 200;
  int repetitions = 3;
  int minibatch = 64;
  double lr_g = 1e-3;
  double lr_d = 1e-3;
  double momentum = 0.9;
  int d_steps_per_g_step = 1;
  int pretrain_samples = 5000;
  int pretrain_passes = 200;
  double pretrain_lr = 0.5;
  int patience = 5;
  double resample_spacing = 0.2;
  // Share of the training scenarios held out for early stopping.
  double val_fraction = 0.2;
  GeneratorLoss generator_loss = GeneratorLoss::non_saturating;
  // Ablations: collect planned nodes from the whole tree, keep node sets
  // across epochs.
  bool tree_nodes = false;
  bool accumulate = false;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Pretraining regression target: clip(0.2 f1 + 0.2 (1 - f2) + 0.2 (f3 + f4 + f5), 0, 1).
double pretrain_target(const FeatureVector& f);

struct PretrainSummary {
  int passes = 0;
  double mse = 0.0;
  double d_loss = 0.0;
  std::string warning;
};

// Feature vectors at the path resampled every `spacing` meters.
std::vector<FeatureVector> collect_nodes(const World& world, const Path& path, double spacing);

// Random free points of the given worlds with their features.
std::vector<FeatureVector> sample_free_features(const std::vector<const World*>& worlds, int count, std::uint64_t seed);

// Regresses G onto pretrain_target, then trains D for one epoch of rollouts.
PretrainSummary pretrain(GanPair& pair, const std::vector<const World*>& worlds, const std::vector<Path>& demos,
                         const TrainConfig& config, const PlannerConfig& planner);

struct EpochRow {
  int epoch = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double train_homotopy_rate = 0.0;
  double val_homotopy_rate = 0.0;
  double val_dissimilarity = 0.0;
  int rollouts = 0;
  int failures = 0;
  bool improved = false;
};

struct TrainReport {
  PretrainSummary pretrain;
  double baseline_val_homotopy_rate = 0.0;
  double baseline_val_dissimilarity = 0.0;
  std::vector<EpochRow> epochs;
  int best_epoch = 0;  // 0 is the pretrained pair
  int stopping_epoch = 0;
  std::string stopping_reason;
};

struct TrainHooks {
  std::function<void(const EpochRow&, const GanPair&)> on_epoch;
  std::function<bool()> cancelled;
};

struct PlannerScore {
  double homotopy_rate = 0.0;
  double mean_dissimilarity = 0.0;
  int failures = 0;
};

// One GAN-RRT* run per scenario with seeds derived from `seed`. Failed runs
// count as not homotopic and are left out of the dissimilarity mean.
PlannerScore score_planner(const GanPair& pair, const std::vector<const World*>& worlds,
                           const std::vector<Path>& demos, const PlannerConfig& planner, std::uint64_t seed);

// The adversarial loop. `pair` must already be pretrained; on return it holds
// the parameters of the best validation epoch. Throws Error(training_aborted)
// when more than half of an epoch's planner runs fail.
TrainReport train(GanPair& pair, const std::vector<const World*>& train_worlds, const std::vector<Path>& train_demos,
                  const std::vector<const World*>& val_worlds, const std::vector<Path>& val_demos,
                  const TrainConfig& config, const PlannerConfig& planner, const TrainHooks& hooks = {});

}  // namespace socnav
