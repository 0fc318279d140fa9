#include <chrono>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "socnav/oracle.hpp"
#include "socnav/service.hpp"

using namespace socnav;

namespace {

struct Running {
  fs::path state;
  std::unique_ptr<Service> service;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Running(const AppConfig& cfg) {
    state = fs::temp_directory_path() / ("socnav_service_test_" + std::to_string(::getpid()));
    fs::remove_all(state);
    service = std::make_unique<Service>(state, cfg);
    service->mount(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
    service.reset();
    fs::remove_all(state);
  }
};

Json body_of(const httplib::Result& r) { return Json::parse(r->body); }

AppConfig quick_config() {
  AppConfig c;
  c.planner.max_iterations = 1000;
  c.train.epochs_max = 1;
  c.train.repetitions = 1;
  c.train.pretrain_samples = 500;
  c.train.minibatch = 32;
  return c;
}

}  // namespace

TEST_CASE("service endpoints") {
  const AppConfig cfg = quick_config();
  Running rs(cfg);
  httplib::Client cli("127.0.0.1", rs.port);
  cli.set_read_timeout(60, 0);

  GenerateOptions o;
  o.count = 5;
  o.width = 140;
  o.resolution = 0.05;
  o.height = 110;
  o.seed = 8;
  const auto scenarios = generate_scenarios(o);
  for (const Scenario& s : scenarios) {
    const auto r = cli.Post("/api/scenarios", scenario_to_json(s).dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 201);
  }
  CHECK(fs::exists(rs.state / "scenarios" / "scn_000.json"));

  SUBCASE("reads and errors") {
    auto r = cli.Get("/api/scenarios");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type") == "application/json");
    CHECK(body_of(r).size() == 5);
    CHECK(body_of(r)[0]["id"] == "scn_000");

    r = cli.Get("/api/scenarios/scn_001");
    CHECK(scenario_from_json(body_of(r)) == scenarios[1]);

    r = cli.Get("/api/scenarios/nope");
    CHECK(r->status == 404);
    CHECK(body_of(r)["error"] == "not_found");

    r = cli.Post("/api/scenarios", scenario_to_json(scenarios[0]).dump(), "application/json");
    CHECK(r->status == 409);

    Scenario bad = scenarios[0];
    bad.id = "bad";
    bad.goal = {-1.0, 1.0};
    r = cli.Post("/api/scenarios", scenario_to_json(bad).dump(), "application/json");
    CHECK(r->status == 422);
    CHECK(body_of(r)["field"] == "goal");
    CHECK_FALSE(fs::exists(rs.state / "scenarios" / "bad.json"));

    r = cli.Post("/api/scenarios", "{not json", "application/json");
    CHECK(r->status == 400);
    CHECK(body_of(r)["error"] == "malformed_document");

    r = cli.Get("/api/train/job_99");
    CHECK(r->status == 404);
    r = cli.Post("/api/scenarios/scn_000/plan", R"({"planner":"ganrrtstar","model":"missing"})", "application/json");
    CHECK(r->status == 404);
  }

  SUBCASE("demo round trip, plan with metrics, training jobs") {
    const Scenario& s = scenarios[0];
    // Straight demo is unlikely to be free; use the oracle and nudge the start.
    Path demo = oracle_demo(s);
    Json pts = path_to_json(demo)["points"];
    pts[0]["x"] = pts[0]["x"].get<double>() + 0.05;
    auto r = cli.Post("/api/scenarios/scn_000/demos", Json{{"points", pts}}.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 201);
    const Json stored = body_of(r);
    CHECK(stored["snapped"]["start"] == true);
    CHECK(path_from_json(stored["path"]).points == demo.points);
    CHECK(path_from_json(stored["path"]).source == PathSource::demo_human);

    r = cli.Get("/api/scenarios/scn_000/paths");
    REQUIRE(body_of(r).size() == 1);
    CHECK(path_from_json(body_of(r)[0]) == path_from_json(stored["path"]));

    const Json collide = Json::array({path_to_json(demo)["points"][0], {{"x", s.grid.width_m() * 0.5}, {"y", -0.5}},
                                      path_to_json(demo)["points"].back()});
    r = cli.Post("/api/scenarios/scn_001/demos", Json{{"points", collide}}.dump(), "application/json");
    CHECK(r->status == 422);

    r = cli.Post("/api/scenarios/scn_000/plan", R"({"planner":"rrtstar","seed":4})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    const Json plan = body_of(r);
    REQUIRE(plan["success"] == true);
    CHECK(plan["metrics"].contains("homotopic"));
    // Same path as a direct (command line) plan with the same seed.
    PlannerConfig pc = cfg.planner;
    pc.seed = 4;
    const World w(s, cfg.features);
    const PlanResult direct = plan_scenario(w, PlannerKind::rrt_star, nullptr, pc);
    CHECK(path_from_json(plan["path"]) == *direct.path);
    CHECK(plan["metrics"]["homotopic"] == same_homotopy(s, demo, *direct.path));
    r = cli.Get("/api/scenarios/scn_000/paths");
    CHECK(body_of(r).size() == 2);

    for (int i = 1; i < 5; ++i) {
      const Path d = oracle_demo(scenarios[static_cast<std::size_t>(i)]);
      r = cli.Post("/api/scenarios/" + scenarios[static_cast<std::size_t>(i)].id + "/demos",
                   Json{{"points", path_to_json(d)["points"]}}.dump(), "application/json");
      CHECK(r->status == 201);
    }

    r = cli.Post("/api/train", R"({"config":{"train":{"epochs_max":50}}})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 202);
    const std::string first = body_of(r)["id"];
    r = cli.Post("/api/train", "{}", "application/json");
    CHECK(r->status == 409);
    r = cli.Delete("/api/train/" + first);
    CHECK(r->status == 200);
    rs.service->wait_for_training();
    r = cli.Get("/api/train/" + first);
    CHECK(body_of(r)["state"] == "failed");
    CHECK(body_of(r)["error"] == "cancelled");

    r = cli.Post("/api/train", R"({"config":{"train":{"epochs_max":1}},"seed":3})", "application/json");
    CHECK(r->status == 202);
    const std::string second = body_of(r)["id"];
    rs.service->wait_for_training();
    r = cli.Get("/api/train/" + second);
    const Json job = body_of(r);
    CHECK(job["state"] == "done");
    CHECK(job["progress"]["epochs_done"] == 1);
    CHECK(job["rows"].size() == 1);

    r = cli.Get("/api/models");
    const Json models = body_of(r);
    const std::string best = second + "/best";
    CHECK(std::find(models.begin(), models.end(), Json{{"name", best}}) != models.end());

    r = cli.Post("/api/scenarios/scn_000/plan", Json{{"planner", "ganrrtstar"}, {"model", best}, {"seed", 1}}.dump(),
                 "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["path"]["source"] == "gan_rrt_star");
  }
}
