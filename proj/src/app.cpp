#include "socnav/app.hpp"

#include <cstdio>
#include <map>
#include <memory>

#include "socnav/error.hpp"
#include "socnav/rng.hpp"

namespace socnav {

std::vector<Scenario> run_gen(const GenRequest& req) {
  GenerateOptions o;
  o.count = req.count;
  o.width = req.width;
  o.height = req.height;
  o.pedestrian_count = req.pedestrians;
  o.empty_map = req.empty_map;
  o.seed = req.seed;
  if (req.pedestrians < 0) throw Error(errc::invalid_config, "peds", "must be >= 0");
  std::vector<Scenario> out = generate_scenarios(o);
  for (const Scenario& s : out) write_json(req.out / (s.id + ".json"), scenario_to_json(s));
  return out;
}

std::vector<Path> run_demo(const fs::path& scenarios, const fs::path& out, const AppConfig& config) {
  std::vector<Path> demos;
  for (const Scenario& s : load_scenarios(scenarios)) {
    const World world(s, config.features);
    demos.push_back(oracle_demo(world, config.oracle));
    write_json(out / (s.id + ".json"), path_to_json(demos.back()));
  }
  return demos;
}

Split make_split(std::size_t count, const std::string& ratio, double val_fraction) {
  const auto colon = ratio.find(':');
  int a = 0, b = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument("no colon");
    std::size_t used = 0;
    a = std::stoi(ratio.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing");
    b = std::stoi(ratio.substr(colon + 1), &used);
    if (used != ratio.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw Error(errc::invalid_config, "split", "expected TRAIN:TEST, e.g. 75:25");
  }
  if (a <= 0 || b < 0) throw Error(errc::invalid_config, "split", "parts must be positive");
  const std::size_t n_train = count * static_cast<std::size_t>(a) / static_cast<std::size_t>(a + b);
  const std::size_t n_val = static_cast<std::size_t>(std::ceil(val_fraction * static_cast<double>(n_train)));
  if (n_train < 2 || n_val < 1 || n_val >= n_train)
    throw Error(errc::invalid_config, "split", "too few scenarios for a training and validation share");
  Split s;
  for (std::size_t i = 0; i < count; ++i) {
    if (i < n_train - n_val) {
      s.train.push_back(i);
    } else if (i < n_train) {
      s.val.push_back(i);
    } else {
      s.test.push_back(i);
    }
  }
  return s;
}

namespace {

std::string epoch_name(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%03d.json", epoch);
  return buf;
}

Json ids(const std::vector<Scenario>& scenarios, const std::vector<std::size_t>& idx) {
  Json out = Json::array();
  for (std::size_t i : idx) out.push_back(scenarios[i].id);
  return out;
}

struct Corpus {
  std::vector<Scenario> scenarios;
  std::vector<Path> demos;
  std::vector<std::unique_ptr<World>> worlds;

  std::vector<const World*> worlds_at(const std::vector<std::size_t>& idx) const {
    std::vector<const World*> out;
    for (std::size_t i : idx) out.push_back(worlds[i].get());
    return out;
  }
  std::vector<Path> demos_at(const std::vector<std::size_t>& idx) const {
    std::vector<Path> out;
    for (std::size_t i : idx) out.push_back(demos[i]);
    return out;
  }
};

Corpus load_corpus(const fs::path& scenarios, const fs::path& demos, const FeatureConfig& features,
                   bool only_with_demos = false) {
  Corpus c;
  c.scenarios = load_scenarios(scenarios);
  if (only_with_demos) {
    std::vector<Scenario> keep;
    for (Scenario& s : c.scenarios) {
      if (fs::exists(demos / (s.id + ".json"))) keep.push_back(std::move(s));
    }
    c.scenarios = std::move(keep);
  }
  c.demos = load_paths_for(demos, c.scenarios);
  for (std::size_t i = 0; i < c.scenarios.size(); ++i) {
    validate_path(c.scenarios[i], c.demos[i]);
    c.worlds.push_back(std::make_unique<World>(c.scenarios[i], features));
  }
  return c;
}

TrainReport train_corpus(const Corpus& c, const Split& split, const fs::path& out, const AppConfig& config,
                         std::uint64_t seed, const TrainHooks& hooks) {
  TrainConfig tc = config.train;
  tc.seed = seed;
  const auto train_w = c.worlds_at(split.train);
  const auto train_d = c.demos_at(split.train);
  const auto val_w = c.worlds_at(split.val);
  const auto val_d = c.demos_at(split.val);

  write_json(out / "split.json", Json{{"train", ids(c.scenarios, split.train)},
                                      {"val", ids(c.scenarios, split.val)},
                                      {"test", ids(c.scenarios, split.test)}});
  GanPair pair = GanPair::create(derive_seed(seed, 0x6a6e));
  const PretrainSummary pre = pretrain(pair, train_w, train_d, tc, config.planner);
  write_json(out / "pretrained.json", pair_to_json(pair));

  TrainHooks inner = hooks;
  inner.on_epoch = [&](const EpochRow& row, const GanPair& p) {
    if (row.improved) write_json(out / epoch_name(row.epoch), pair_to_json(p));
    if (hooks.on_epoch) hooks.on_epoch(row, p);
  };
  TrainReport report = train(pair, train_w, train_d, val_w, val_d, tc, config.planner, inner);
  report.pretrain = pre;
  write_json(out / "best.json", pair_to_json(pair));
  write_json(out / "train_report.json", train_report_to_json(report));
  write_text(out / "train_report.csv", train_report_to_csv(report));
  return report;
}

void plan_many(const std::vector<const World*>& worlds, PlannerKind kind, const GanPair* pair, const fs::path& out,
               const PlannerConfig& base, std::uint64_t seed) {
  fs::create_directories(out);
  for (const World* w : worlds) {
    PlannerConfig pc = base;
    pc.seed = seed;
    const PlanResult r = plan_scenario(*w, kind, pair, pc);
    if (r.success()) {
      write_json(out / (w->scenario.id + ".json"), path_to_json(*r.path));
    } else {
      write_text(out / (w->scenario.id + ".failed"), r.failure + "\n");
    }
  }
}

const char* planner_label(PlannerKind k) {
  switch (k) {
    case PlannerKind::rrt:
      return "rrt";
    case PlannerKind::rrt_star:
      return "rrt_star";
    case PlannerKind::gan_rrt_star:
      return "gan_rrt_star";
  }
  return "unknown";
}

}  // namespace

TrainReport run_train(const TrainRequest& req, const AppConfig& config, const TrainHooks& hooks) {
  const Corpus c = load_corpus(req.scenarios, req.demos, config.features, req.only_with_demos);
  const Split split = make_split(c.scenarios.size(), req.split, config.train.val_fraction);
  return train_corpus(c, split, req.out, config, req.seed, hooks);
}

PlanResult plan_scenario(const World& world, PlannerKind kind, const GanPair* pair, const PlannerConfig& config) {
  return run_planner(kind, world, pair, config);
}

Json tree_to_json(const PlanTree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back({{"point", {{"x", n.point.x}, {"y", n.point.y}}}, {"parent", n.parent}, {"cost", n.cost}});
  }
  return nodes;
}

void run_plan_batch(const fs::path& scenarios, PlannerKind kind, const std::optional<fs::path>& model,
                    const fs::path& out, const AppConfig& config, std::uint64_t seed) {
  std::optional<GanPair> pair;
  if (model) pair = load_pair(*model);
  if (kind == PlannerKind::gan_rrt_star && !pair) throw Error(errc::invalid_config, "model", "ganrrtstar needs --model");
  std::vector<std::unique_ptr<World>> worlds;
  std::vector<const World*> ptrs;
  for (const Scenario& s : load_scenarios(scenarios)) {
    worlds.push_back(std::make_unique<World>(s, config.features));
    ptrs.push_back(worlds.back().get());
  }
  plan_many(ptrs, kind, pair ? &*pair : nullptr, out, config.planner, seed);
}

EvalEntry evaluate_dir(const std::vector<Scenario>& scenarios, const fs::path& demos, const fs::path& plans,
                       const AppConfig& config) {
  EvalEntry entry;
  std::map<std::string, Path> plan_by_id;
  for (const fs::path& f : json_files(plans)) {
    Path p = load_path(f);
    if (entry.planner.empty()) entry.planner = to_string(p.source);
    plan_by_id[p.scenario_id] = std::move(p);
  }
  if (entry.planner.empty()) entry.planner = plans.filename().string();
  std::vector<Scenario> used;
  for (const Scenario& s : scenarios) {
    if (plan_by_id.count(s.id) || fs::exists(plans / (s.id + ".failed"))) used.push_back(s);
  }
  if (used.size() < plan_by_id.size()) {
    for (const auto& [id, p] : plan_by_id) {
      bool known = false;
      for (const Scenario& s : used) known = known || s.id == id;
      if (!known) throw Error(errc::scenario_mismatch, plans.string(), "plan for unknown scenario '" + id + "'");
    }
  }
  if (used.empty()) throw Error(errc::empty_batch, plans.string(), "no plans to evaluate");
  const std::vector<Path> demo_paths = load_paths_for(demos, used);
  for (std::size_t i = 0; i < used.size(); ++i) {
    const auto it = plan_by_id.find(used[i].id);
    if (it == plan_by_id.end()) {
      entry.failed.push_back(used[i].id);
      continue;
    }
    const World world(used[i], config.features);
    entry.reports.push_back(evaluate_pair(world, demo_paths[i], it->second, config.metrics));
  }
  entry.aggregate = aggregate(entry.reports, static_cast<int>(entry.failed.size()));
  return entry;
}

std::vector<EvalEntry> run_eval(const fs::path& scenarios, const fs::path& demos, const std::vector<fs::path>& plans,
                                const fs::path& out, const AppConfig& config) {
  const std::vector<Scenario> all = load_scenarios(scenarios);
  std::vector<EvalEntry> entries;
  for (const fs::path& p : plans) entries.push_back(evaluate_dir(all, demos, p, config));
  write_json(out, eval_to_json(entries));
  fs::path csv = out;
  csv.replace_extension(".csv");
  write_text(csv, eval_to_csv(entries));
  return entries;
}

ExperimentSummary run_experiment(const ExperimentRequest& req, const AppConfig& config,
                                 const std::function<void(const std::string&)>& log) {
  const auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  const fs::path scen_dir = req.out / "scenarios";
  const fs::path demo_dir = req.out / "demos";
  const fs::path model_dir = req.out / "model";

  GenRequest gen;
  gen.count = req.count;
  gen.width = req.width;
  gen.height = req.height;
  gen.pedestrians = req.pedestrians;
  gen.seed = req.seed;
  gen.out = scen_dir;
  run_gen(gen);
  say("generated " + std::to_string(req.count) + " scenarios");
  run_demo(scen_dir, demo_dir, config);
  say("oracle demos written");

  const Corpus c = load_corpus(scen_dir, demo_dir, config.features);
  const Split split = make_split(c.scenarios.size(), req.split, config.train.val_fraction);
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochRow& r, const GanPair&) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "epoch %d d_loss %.4f g_loss %.4f val_rate %.3f val_dis %.4f%s", r.epoch, r.d_loss,
                  r.g_loss, r.val_homotopy_rate, r.val_dissimilarity, r.improved ? " *" : "");
    say(buf);
  };
  ExperimentSummary summary;
  summary.training = train_corpus(c, split, model_dir, config, req.seed, hooks);
  const GanPair pair = load_pair(model_dir / "best.json");
  say("training stopped: " + summary.training.stopping_reason);

  std::vector<Scenario> test;
  for (std::size_t i : split.test) test.push_back(c.scenarios[i]);
  const auto test_worlds = c.worlds_at(split.test);
  std::vector<EvalEntry> entries;
  MetricAggregate* sums[2] = {&summary.rrt_star, &summary.gan_rrt_star};
  for (int s = 0; s < req.plan_seeds; ++s) {
    const std::uint64_t seed = derive_seed(req.seed, 0x706c616e, static_cast<std::uint64_t>(s));
    int k = 0;
    for (PlannerKind kind : {PlannerKind::rrt_star, PlannerKind::gan_rrt_star}) {
      const fs::path dir = req.out / "plans" / (std::string(planner_label(kind)) + "_" + std::to_string(s));
      plan_many(test_worlds, kind, &pair, dir, config.planner, seed);
      EvalEntry e = evaluate_dir(test, demo_dir, dir, config);
      e.planner = planner_label(kind);
      e.seed = seed;
      sums[k]->homotopy_rate += e.aggregate.homotopy_rate / req.plan_seeds;
      sums[k]->mean_dissimilarity += e.aggregate.mean_dissimilarity / req.plan_seeds;
      sums[k]->feature_difference += e.aggregate.feature_difference / req.plan_seeds;
      entries.push_back(std::move(e));
      ++k;
    }
  }

  Json report{{"request",
               {{"count", req.count},
                {"width", req.width},
                {"height", req.height},
                {"pedestrians", req.pedestrians},
                {"split", req.split},
                {"plan_seeds", req.plan_seeds},
                {"seed", req.seed}}},
              {"config", config_to_json(config)},
              {"split",
               {{"train", ids(c.scenarios, split.train)},
                {"val", ids(c.scenarios, split.val)},
                {"test", ids(c.scenarios, split.test)}}},
              {"training", train_report_to_json(summary.training)},
              {"evaluations", eval_to_json(entries)},
              {"summary",
               {{"rrt_star", aggregate_to_json(summary.rrt_star)},
                {"gan_rrt_star", aggregate_to_json(summary.gan_rrt_star)}}}};
  write_json(req.out / "report.json", report);
  return summary;
}

}  // namespace socnav
