#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "socnav/app.hpp"
#include "socnav/error.hpp"
#include "socnav/service.hpp"

using namespace socnav;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file (planner, features, oracle, train, metrics blocks)")
      ->check(CLI::ExistingFile);
  c.seed_opt = cmd->add_option("--seed", c.seed, "Base random seed");
}

void log_line(const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially adaptive path planning workbench"};
  app.require_subcommand(1);

  Common gen_c, demo_c, train_c, plan_c, eval_c, serve_c, exp_c;

  GenRequest gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded scenario corpus");
  add_common(gen_cmd, gen_c);
  gen_cmd->add_option("--count", gen.count, "Number of scenarios")->capture_default_str();
  gen_cmd->add_option("--width", gen.width, "Map width in cells")->capture_default_str();
  gen_cmd->add_option("--height", gen.height, "Map height in cells")->capture_default_str();
  gen_cmd->add_option("--peds", gen.pedestrians, "Pedestrians per scenario")->capture_default_str();
  gen_cmd->add_flag("--empty", gen.empty_map, "Obstacle-free maps");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  std::string demo_scen, demo_mode = "oracle", demo_out;
  auto* demo_cmd = app.add_subcommand("demo", "Write oracle demonstration paths");
  add_common(demo_cmd, demo_c);
  demo_cmd->add_option("--scenarios", demo_scen, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  demo_cmd->add_option("--mode", demo_mode, "Demonstrator")->check(CLI::IsMember({"oracle"}))->capture_default_str();
  demo_cmd->add_option("--out", demo_out, "Output directory")->required();

  TrainRequest train_req;
  std::string train_scen, train_demos, train_out;
  auto* train_cmd = app.add_subcommand("train", "Pretrain and run the adversarial training loop");
  add_common(train_cmd, train_c);
  train_cmd->add_option("--scenarios", train_scen, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--demos", train_demos, "Demo directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--split", train_req.split, "TRAIN:TEST ratio over scenarios in id order")->capture_default_str();
  train_cmd->add_option("--out", train_out, "Model directory")->required();

  std::string plan_scen, plan_scens, plan_planner = "rrtstar", plan_model, plan_out, plan_tree;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one scenario, or every scenario of a directory");
  add_common(plan_cmd, plan_c);
  auto* one = plan_cmd->add_option("--scenario", plan_scen, "Scenario file")->check(CLI::ExistingFile);
  auto* many = plan_cmd->add_option("--scenarios", plan_scens, "Scenario directory (batch mode)")
                   ->check(CLI::ExistingDirectory);
  one->excludes(many);
  plan_cmd->add_option("--planner", plan_planner, "rrt | rrtstar | ganrrtstar")
      ->check(CLI::IsMember({"rrt", "rrtstar", "ganrrtstar"}))
      ->capture_default_str();
  plan_cmd->add_option("--model", plan_model, "Model file (required for ganrrtstar)")->check(CLI::ExistingFile);
  plan_cmd->add_option("--out", plan_out, "Output path file, or directory in batch mode")->required();
  plan_cmd->add_option("--dump-tree", plan_tree, "Write the search tree as JSON");

  std::string eval_scen, eval_demos, eval_out;
  std::vector<std::string> eval_plans;
  auto* eval_cmd = app.add_subcommand("eval", "Compare plans against demos");
  add_common(eval_cmd, eval_c);
  eval_cmd->add_option("--scenarios", eval_scen, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--demos", eval_demos, "Demo directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--plans", eval_plans, "Plan directory; repeat for several planners")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--out", eval_out, "Report file (a .csv twin is written next to it)")->required();

  int port = 8080;
  std::string state, host = "127.0.0.1", ui_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  add_common(serve_cmd, serve_c);
  serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--state", state, "State directory")->required();
  serve_cmd->add_option("--ui", ui_dir, "Built UI bundle served at /")->check(CLI::ExistingDirectory);

  ExperimentRequest exp;
  std::string exp_out;
  auto* exp_cmd = app.add_subcommand("experiment", "gen, demo, train, plan and eval in one deterministic run");
  add_common(exp_cmd, exp_c);
  exp_cmd->add_option("--count", exp.count, "Number of scenarios")->capture_default_str();
  exp_cmd->add_option("--width", exp.width, "Map width in cells")->capture_default_str();
  exp_cmd->add_option("--height", exp.height, "Map height in cells")->capture_default_str();
  exp_cmd->add_option("--peds", exp.pedestrians, "Pedestrians per scenario")->capture_default_str();
  exp_cmd->add_option("--split", exp.split, "TRAIN:TEST ratio")->capture_default_str();
  exp_cmd->add_option("--plan-seeds", exp.plan_seeds, "Planning seeds per planner")->capture_default_str();
  exp_cmd->add_option("--out", exp_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }

  try {
    const auto config_for = [](const Common& c) { return load_config(c.config); };
    if (gen_cmd->parsed()) {
      gen.seed = gen_c.seed;
      gen.out = gen_out;
      load_config(gen_c.config);
      run_gen(gen);
    } else if (demo_cmd->parsed()) {
      run_demo(demo_scen, demo_out, config_for(demo_c));
    } else if (train_cmd->parsed()) {
      const AppConfig cfg = config_for(train_c);
      train_req.scenarios = train_scen;
      train_req.demos = train_demos;
      train_req.out = train_out;
      train_req.seed = train_c.seed_opt->count() ? train_c.seed : cfg.train.seed;
      TrainHooks hooks;
      hooks.on_epoch = [](const EpochRow& r, const GanPair&) {
        std::fprintf(stderr, "epoch %d d_loss %.4f g_loss %.4f val_rate %.3f%s\n", r.epoch, r.d_loss, r.g_loss,
                     r.val_homotopy_rate, r.improved ? " *" : "");
      };
      const TrainReport r = run_train(train_req, cfg, hooks);
      std::fprintf(stderr, "stopped after epoch %d (%s), best epoch %d\n", r.stopping_epoch,
                   r.stopping_reason.c_str(), r.best_epoch);
    } else if (plan_cmd->parsed()) {
      const AppConfig cfg = config_for(plan_c);
      const std::uint64_t seed = plan_c.seed_opt->count() ? plan_c.seed : cfg.planner.seed;
      const PlannerKind kind = planner_kind_from_string(plan_planner);
      const std::optional<fs::path> model = plan_model.empty() ? std::nullopt : std::optional<fs::path>(plan_model);
      if (!plan_scens.empty()) {
        run_plan_batch(plan_scens, kind, model, plan_out, cfg, seed);
      } else {
        if (plan_scen.empty()) throw Error(errc::invalid_config, "scenario", "pass --scenario or --scenarios");
        std::optional<GanPair> pair;
        if (model) pair = load_pair(*model);
        if (kind == PlannerKind::gan_rrt_star && !pair)
          throw Error(errc::invalid_config, "model", "ganrrtstar needs --model");
        const World world(load_scenario(plan_scen), cfg.features);
        PlannerConfig pc = cfg.planner;
        pc.seed = seed;
        const PlanResult r = plan_scenario(world, kind, pair ? &*pair : nullptr, pc);
        if (!plan_tree.empty()) write_json(plan_tree, tree_to_json(r.tree));
        if (!r.success()) throw Error(errc::infeasible, world.scenario.id, r.failure);
        write_json(plan_out, path_to_json(*r.path));
      }
    } else if (eval_cmd->parsed()) {
      std::vector<fs::path> plans(eval_plans.begin(), eval_plans.end());
      for (const EvalEntry& e : run_eval(eval_scen, eval_demos, plans, eval_out, config_for(eval_c))) {
        std::printf("%s homotopy_rate %.4f mean_dissimilarity %.6f feature_difference %.6f\n", e.planner.c_str(),
                    e.aggregate.homotopy_rate, e.aggregate.mean_dissimilarity, e.aggregate.feature_difference);
      }
    } else if (serve_cmd->parsed()) {
      AppConfig cfg = config_for(serve_c);
      if (serve_c.seed_opt->count()) cfg.planner.seed = serve_c.seed;
      Service service(state, cfg);
      std::fprintf(stderr, "listening on %s:%d\n", host.c_str(), port);
      if (!service.listen(host, port, ui_dir.empty() ? std::nullopt : std::optional<fs::path>(ui_dir)))
        throw Error(errc::io_error, "port", "cannot listen on " + host + ":" + std::to_string(port));
    } else if (exp_cmd->parsed()) {
      exp.seed = exp_c.seed;
      exp.out = exp_out;
      const ExperimentSummary s = run_experiment(exp, config_for(exp_c), log_line);
      std::printf("rrt_star     homotopy_rate %.4f mean_dissimilarity %.6f feature_difference %.6f\n",
                  s.rrt_star.homotopy_rate, s.rrt_star.mean_dissimilarity, s.rrt_star.feature_difference);
      std::printf("gan_rrt_star homotopy_rate %.4f mean_dissimilarity %.6f feature_difference %.6f\n",
                  s.gan_rrt_star.homotopy_rate, s.gan_rrt_star.mean_dissimilarity, s.gan_rrt_star.feature_difference);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
