#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "socnav/io.hpp"

namespace socnav {

// File-level operations shared by the command line tool, the HTTP service
// and the acceptance suite.

struct GenRequest {
  int count = 100;
  int width = 324;
  int height = 257;
  int pedestrians = 3;
  bool empty_map = false;
  std::uint64_t seed = 0;
  fs::path out;
};
std::vector<Scenario> run_gen(const GenRequest& req);

// One oracle demo per scenario, written as <id>.json.
std::vector<Path> run_demo(const fs::path& scenarios, const fs::path& out, const AppConfig& config);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;  // carved from the training share
  std::vector<std::size_t> test;
};
// "75:25" style ratio over scenarios in id order.
Split make_split(std::size_t count, const std::string& ratio, double val_fraction);

struct TrainRequest {
  fs::path scenarios;
  fs::path demos;
  std::string split = "75:25";
  fs::path out;
  std::uint64_t seed = 0;
  // Train on the scenarios that have a demo instead of requiring all of them.
  bool only_with_demos = false;
};
// Writes pretrained.json, epoch_NNN.json for improving epochs, best.json,
// split.json and train_report.{json,csv} under req.out.
TrainReport run_train(const TrainRequest& req, const AppConfig& config, const TrainHooks& hooks = {});

PlanResult plan_scenario(const World& world, PlannerKind kind, const GanPair* pair, const PlannerConfig& config);
Json tree_to_json(const PlanTree& tree);

// Batch planning; failures leave a <id>.failed marker instead of a path.
void run_plan_batch(const fs::path& scenarios, PlannerKind kind, const std::optional<fs::path>& model,
                    const fs::path& out, const AppConfig& config, std::uint64_t seed);

// Evaluates every scenario that has both a demo and a plan (or failure marker).
EvalEntry evaluate_dir(const std::vector<Scenario>& scenarios, const fs::path& demos, const fs::path& plans,
                       const AppConfig& config);
std::vector<EvalEntry> run_eval(const fs::path& scenarios, const fs::path& demos, const std::vector<fs::path>& plans,
                                const fs::path& out, const AppConfig& config);

struct ExperimentRequest {
  int count = 100;
  int width = 324;
  int height = 257;
  int pedestrians = 3;
  std::string split = "75:25";
  int plan_seeds = 3;
  std::uint64_t seed = 0;
  fs::path out;
};

struct ExperimentSummary {
  MetricAggregate rrt_star;
  MetricAggregate gan_rrt_star;
  TrainReport training;
};

// gen, demo, train, plan on the test split with RRT* and GAN-RRT* for every
// planning seed, eval. Writes report.json (deterministic) under req.out.
ExperimentSummary run_experiment(const ExperimentRequest& req, const AppConfig& config,
                                 const std::function<void(const std::string&)>& log = {});

}  // namespace socnav
