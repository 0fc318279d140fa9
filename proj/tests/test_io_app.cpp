#include "doctest.h"
#include "socnav/app.hpp"
#include "socnav/error.hpp"
#include "socnav/oracle.hpp"

using namespace socnav;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("socnav_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

AppConfig quick_config() {
  AppConfig c;
  c.planner.max_iterations = 1000;
  c.planner.discriminator_gate = 0.25;
  c.train.epochs_max = 2;
  c.train.repetitions = 1;
  c.train.pretrain_samples = 500;
  c.train.minibatch = 32;
  c.train.lr_d = 0.5;
  c.train.lr_g = 0.01;
  return c;
}

}  // namespace

TEST_CASE("config blocks: defaults, round trip, unknown keys") {
  const AppConfig d = config_from_json(Json::object());
  CHECK(d.planner == PlannerConfig{});
  CHECK(d.train == TrainConfig{});
  AppConfig c = quick_config();
  c.train.generator_loss = GeneratorLoss::literal;
  const AppConfig back = config_from_json(config_to_json(c));
  CHECK(back.planner == c.planner);
  CHECK(back.train == c.train);
  CHECK(back.oracle == c.oracle);
  CHECK(back.features == c.features);
  try {
    config_from_json(Json::parse(R"({"planner": {"lambda": 2}})"));
    FAIL("expected invalid_config");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_config);
    CHECK(e.field() == "planner.lambda");
  }
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"planner": {"goal_bias": 2}})")), Error);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"trainer": {}})")), Error);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"train": {"epochs_max": "many"}})")), Error);
  CHECK(load_config("") .planner == PlannerConfig{});
}

TEST_CASE("model files round trip exactly") {
  GanPair p = GanPair::create(77);
  const GanPair q = pair_from_json(Json::parse(pair_to_json(p).dump()));
  CHECK(q.generator == p.generator);
  CHECK(q.discriminator == p.discriminator);
  CHECK(q.seed == 77);
  Json bad = pair_to_json(p);
  bad["generator"]["layers"] = {5, 9, 1};
  CHECK_THROWS_AS(pair_from_json(bad), Error);
}

TEST_CASE("split carves validation from the training share") {
  const Split s = make_split(100, "75:25", 0.2);
  CHECK(s.train.size() == 60);
  CHECK(s.val.size() == 15);
  CHECK(s.test.size() == 25);
  CHECK(s.train.front() == 0);
  CHECK(s.val.front() == 60);
  CHECK(s.test.front() == 75);
  CHECK_THROWS_AS(make_split(100, "75-25", 0.2), Error);
  CHECK_THROWS_AS(make_split(100, "0:100", 0.2), Error);
}

TEST_CASE("write_text replaces files atomically and read errors are io_error") {
  TempDir t("io");
  write_text(t.path / "a" / "b.txt", "one");
  write_text(t.path / "a" / "b.txt", "two");
  CHECK(read_text(t.path / "a" / "b.txt") == "two");
  for (const auto& e : fs::directory_iterator(t.path / "a")) CHECK(e.path().filename() == "b.txt");
  try {
    read_text(t.path / "missing.json");
    FAIL("expected io_error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::io_error);
  }
  write_text(t.path / "broken.json", "{");
  try {
    read_json(t.path / "broken.json");
    FAIL("expected malformed_document");
  } catch (const Error& e) {
    CHECK(e.code() == errc::malformed_document);
  }
}

TEST_CASE("eval with plans equal to demos gives the identity report") {
  TempDir t("eval");
  GenRequest g;
  g.count = 4;
  g.seed = 2;
  g.out = t.path / "scn";
  run_gen(g);
  const AppConfig cfg = quick_config();
  run_demo(t.path / "scn", t.path / "demos", cfg);
  const auto entries = run_eval(t.path / "scn", t.path / "demos", {t.path / "demos"}, t.path / "report.json", cfg);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].aggregate.homotopy_rate == 1.0);
  CHECK(entries[0].aggregate.mean_dissimilarity == 0.0);
  CHECK(entries[0].aggregate.feature_difference == 0.0);
  CHECK(fs::exists(t.path / "report.csv"));
  const Json rep = read_json(t.path / "report.json");
  REQUIRE(rep.is_array());
  CHECK(rep[0]["aggregate"]["homotopy_rate"] == 1.0);
  CHECK(rep[0]["reports"].size() == 4);

  run_plan_batch(t.path / "scn", PlannerKind::rrt_star, std::nullopt, t.path / "plans", cfg, 1);
  const auto planned = run_eval(t.path / "scn", t.path / "demos", {t.path / "plans"}, t.path / "r2.json", cfg);
  CHECK(planned[0].reports.size() + planned[0].failed.size() == 4);
  CHECK(planned[0].aggregate.mean_dissimilarity > 0.0);
}

TEST_CASE("the pipeline is deterministic and leaves its inputs alone") {
  TempDir t("exp");
  ExperimentRequest r;
  r.count = 8;
  r.plan_seeds = 2;
  r.seed = 5;
  const AppConfig cfg = quick_config();
  r.out = t.path / "a";
  const ExperimentSummary a = run_experiment(r, cfg);
  r.out = t.path / "b";
  run_experiment(r, cfg);
  const std::string ra = read_text(t.path / "a" / "report.json");
  CHECK(ra == read_text(t.path / "b" / "report.json"));
  const Json rep = Json::parse(ra);
  CHECK(rep.contains("summary"));
  CHECK(rep["summary"]["gan_rrt_star"]["homotopy_rate"] == a.gan_rrt_star.homotopy_rate);
  CHECK(fs::exists(t.path / "a" / "model" / "best.json"));
  CHECK(fs::exists(t.path / "a" / "model" / "train_report.csv"));

  // Training from the corpus written by the first run reproduces its report.
  const std::string scn_before = read_text(t.path / "a" / "scenarios" / "scn_000.json");
  TrainRequest tr;
  tr.scenarios = t.path / "a" / "scenarios";
  tr.demos = t.path / "a" / "demos";
  tr.out = t.path / "retrain";
  tr.seed = 5;
  const TrainReport again = run_train(tr, cfg);
  CHECK(again.epochs.size() == a.training.epochs.size());
  CHECK(again.epochs.front().d_loss == a.training.epochs.front().d_loss);
  CHECK(read_text(t.path / "a" / "scenarios" / "scn_000.json") == scn_before);
}
