#include "socnav/service.hpp"

#include <regex>

#include "httplib.h"
#include "socnav/error.hpp"

namespace socnav {

namespace {

int status_for(const std::string& code) {
  if (code == errc::not_found) return 404;
  if (code == errc::conflict) return 409;
  if (code == errc::malformed_document || code == errc::invalid_config) return 400;
  if (code == errc::io_error) return 500;
  return 422;
}

void check_id(const std::string& id) {
  static const std::regex ok("[A-Za-z0-9_.-]{1,128}");
  if (!std::regex_match(id, ok) || id == "." || id == "..") throw Error(errc::not_found, "id", "unknown id '" + id + "'");
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(errc::malformed_document, "body", "request body is not valid JSON");
  return j;
}

void reply(httplib::Response& res, const Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply(res, Json{{"error", e.code()}, {"field", e.field()}, {"detail", e.what()}}, status_for(e.code()));
    } catch (const std::exception& e) {
      reply(res, Json{{"error", "internal"}, {"detail", e.what()}}, 500);
    }
  };
}

}  // namespace

Service::Service(fs::path state, AppConfig config) : state_(std::move(state)), config_(std::move(config)) {
  for (const char* d : {"scenarios", "demos", "plans", "models"}) fs::create_directories(state_ / d);
}

Service::~Service() {
  {
    std::lock_guard lock(jobs_mutex_);
    for (auto& [id, j] : jobs_) j->cancel = true;
  }
  wait_for_training();
}

void Service::wait_for_training() {
  if (worker_.joinable()) worker_.join();
}

Scenario Service::load(const std::string& id) const {
  check_id(id);
  const fs::path f = state_ / "scenarios" / (id + ".json");
  if (!fs::exists(f)) throw Error(errc::not_found, "scenario", "unknown scenario '" + id + "'");
  return load_scenario(f);
}

Json Service::list_scenarios() const {
  Json out = Json::array();
  for (const fs::path& f : json_files(state_ / "scenarios")) {
    const Scenario s = load_scenario(f);
    out.push_back({{"id", s.id},
                   {"width", s.grid.width},
                   {"height", s.grid.height},
                   {"resolution", s.grid.resolution},
                   {"pedestrians", s.pedestrians.size()},
                   {"has_demo", fs::exists(state_ / "demos" / (s.id + ".json"))}});
  }
  return out;
}

Json Service::scenario_doc(const std::string& id) const { return scenario_to_json(load(id)); }

Json Service::create_scenario(const Json& body) {
  const Scenario s = scenario_from_json(body);
  check_id(s.id);
  std::lock_guard lock(write_mutex_);
  const fs::path f = state_ / "scenarios" / (s.id + ".json");
  if (fs::exists(f)) throw Error(errc::conflict, "id", "scenario '" + s.id + "' already exists");
  write_json(f, scenario_to_json(s));
  return scenario_to_json(s);
}

Json Service::add_demo(const std::string& id, const Json& body) {
  const Scenario s = load(id);
  Json doc{{"scenario_id", id}, {"source", "demo_human"}, {"points", body.is_object() && body.contains("points") ? body["points"] : Json()}};
  Path p = path_from_json(doc);
  bool snapped_start = false;
  if (!(p.points.front() == s.start) && distance(p.points.front(), s.start) <= s.goal_radius) {
    p.points.front() = s.start;
    snapped_start = true;
  }
  validate_path(s, p);
  std::lock_guard lock(write_mutex_);
  write_json(state_ / "demos" / (id + ".json"), path_to_json(p));
  return Json{{"path", path_to_json(p)}, {"snapped", {{"start", snapped_start}, {"goal", false}}}};
}

Json Service::paths_of(const std::string& id) const {
  load(id);
  Json out = Json::array();
  const fs::path demo = state_ / "demos" / (id + ".json");
  if (fs::exists(demo)) out.push_back(read_json(demo));
  for (const char* planner : {"rrt", "rrt_star", "gan_rrt_star"}) {
    const fs::path f = state_ / "plans" / planner / (id + ".json");
    if (fs::exists(f)) out.push_back(read_json(f));
  }
  return out;
}

fs::path Service::model_file(const std::string& name) const {
  static const std::regex ok("[A-Za-z0-9_.-]+(/[A-Za-z0-9_.-]+)?");
  if (!std::regex_match(name, ok) || name.find("..") != std::string::npos)
    throw Error(errc::not_found, "model", "unknown model '" + name + "'");
  const fs::path f = state_ / "models" / (name + ".json");
  if (!fs::exists(f)) throw Error(errc::not_found, "model", "unknown model '" + name + "'");
  return f;
}

Json Service::plan(const std::string& id, const Json& body) {
  const Scenario s = load(id);
  if (!body.is_object()) throw Error(errc::malformed_document, "body", "expected an object");
  const std::string planner = body.value("planner", std::string("rrtstar"));
  const PlannerKind kind = planner_kind_from_string(planner);
  std::optional<GanPair> pair;
  if (body.contains("model") && !body["model"].is_null()) {
    if (!body["model"].is_string()) throw Error(errc::malformed_document, "model", "expected a model name");
    pair = load_pair(model_file(body["model"].get<std::string>()));
  }
  if (kind == PlannerKind::gan_rrt_star && !pair) throw Error(errc::invalid_config, "model", "ganrrtstar needs a model");
  PlannerConfig pc = config_.planner;
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned()) throw Error(errc::malformed_document, "seed", "expected an unsigned integer");
    pc.seed = body["seed"].get<std::uint64_t>();
  }
  const World world(s, config_.features);
  const PlanResult r = plan_scenario(world, kind, pair ? &*pair : nullptr, pc);
  Json out{{"success", r.success()}, {"iterations", r.iterations}, {"seed", pc.seed}};
  if (!r.success()) {
    out["failure"] = r.failure;
    return out;
  }
  out["path"] = path_to_json(*r.path);
  {
    std::lock_guard lock(write_mutex_);
    write_json(state_ / "plans" / to_string(r.path->source) / (id + ".json"), out["path"]);
  }
  const fs::path demo = state_ / "demos" / (id + ".json");
  if (fs::exists(demo)) {
    const MetricReport m = evaluate_pair(world, load_path(demo), *r.path, config_.metrics);
    out["metrics"] = metric_report_to_json(m);
  }
  return out;
}

Json Service::start_training(const Json& body) {
  if (!body.is_object()) throw Error(errc::malformed_document, "body", "expected an object");
  Json merged = config_to_json(config_);
  if (body.contains("config")) merged.merge_patch(body["config"]);
  const AppConfig cfg = config_from_json(merged);
  TrainRequest req;
  req.scenarios = state_ / "scenarios";
  req.demos = state_ / "demos";
  req.split = body.value("split", std::string("75:25"));
  req.seed = body.contains("seed") ? body["seed"].get<std::uint64_t>() : cfg.train.seed;
  req.only_with_demos = true;

  std::lock_guard lock(jobs_mutex_);
  for (const auto& [jid, j] : jobs_) {
    if (j->state == "queued" || j->state == "running")
      throw Error(errc::conflict, "train", "job '" + jid + "' is still " + j->state);
  }
  wait_for_training();
  auto job = std::make_shared<TrainJob>();
  job->id = "job_" + std::to_string(next_job_++);
  job->epochs_max = cfg.train.epochs_max;
  req.out = state_ / "models" / job->id;
  jobs_[job->id] = job;
  worker_ = std::thread([this, job, req, cfg] {
    {
      std::lock_guard l(jobs_mutex_);
      job->state = "running";
    }
    TrainHooks hooks;
    hooks.cancelled = [job] { return job->cancel.load(); };
    hooks.on_epoch = [this, job](const EpochRow& row, const GanPair&) {
      std::lock_guard l(jobs_mutex_);
      job->rows.push_back(row);
      job->epochs_done = row.epoch;
    };
    try {
      const TrainReport r = run_train(req, cfg, hooks);
      std::lock_guard l(jobs_mutex_);
      if (r.stopping_reason == "cancelled") {
        job->state = "failed";
        job->error = "cancelled";
      } else {
        job->state = "done";
      }
    } catch (const std::exception& e) {
      std::lock_guard l(jobs_mutex_);
      job->state = "failed";
      job->error = e.what();
    }
  });
  Json out{{"id", job->id}, {"state", job->state}};
  return out;
}

Json Service::job_doc(const std::string& id) const {
  std::lock_guard lock(jobs_mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(errc::not_found, "job", "unknown training job '" + id + "'");
  const TrainJob& j = *it->second;
  Json rows = Json::array();
  for (const EpochRow& r : j.rows) rows.push_back(epoch_row_to_json(r));
  Json out{{"id", j.id},
           {"state", j.state},
           {"progress", {{"epochs_done", j.epochs_done}, {"epochs_max", j.epochs_max}}},
           {"rows", rows}};
  if (!j.error.empty()) out["error"] = j.error;
  return out;
}

Json Service::cancel_job(const std::string& id) {
  {
    std::lock_guard lock(jobs_mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(errc::not_found, "job", "unknown training job '" + id + "'");
    it->second->cancel = true;
  }
  return job_doc(id);
}

Json Service::list_models() const {
  Json out = Json::array();
  const fs::path root = state_ / "models";
  std::vector<std::string> names;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    const std::string rel = fs::relative(e.path(), root).replace_extension("").generic_string();
    if (rel.find("train_report") != std::string::npos || rel.find("split") != std::string::npos) continue;
    names.push_back(rel);
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) out.push_back({{"name", n}});
  return out;
}

void Service::mount(httplib::Server& server, const std::optional<fs::path>& static_dir) {
  server.Get("/api/scenarios", guarded([this](const httplib::Request&, httplib::Response& res) {
               reply(res, list_scenarios());
             }));
  server.Post("/api/scenarios", guarded([this](const httplib::Request& req, httplib::Response& res) {
                reply(res, create_scenario(parse_body(req)), 201);
              }));
  server.Get(R"(/api/scenarios/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
               reply(res, scenario_doc(req.matches[1]));
             }));
  server.Post(R"(/api/scenarios/([^/]+)/demos)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                reply(res, add_demo(req.matches[1], parse_body(req)), 201);
              }));
  server.Get(R"(/api/scenarios/([^/]+)/paths)", guarded([this](const httplib::Request& req, httplib::Response& res) {
               reply(res, paths_of(req.matches[1]));
             }));
  server.Post(R"(/api/scenarios/([^/]+)/plan)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                reply(res, plan(req.matches[1], parse_body(req)));
              }));
  server.Post("/api/train", guarded([this](const httplib::Request& req, httplib::Response& res) {
                reply(res, start_training(parse_body(req)), 202);
              }));
  server.Get(R"(/api/train/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
               reply(res, job_doc(req.matches[1]));
             }));
  server.Delete(R"(/api/train/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  reply(res, cancel_job(req.matches[1]));
                }));
  server.Get("/api/models", guarded([this](const httplib::Request&, httplib::Response& res) {
               reply(res, list_models());
             }));
  if (static_dir) server.set_mount_point("/", static_dir->string());
}

bool Service::listen(const std::string& host, int port, const std::optional<fs::path>& static_dir) {
  httplib::Server server;
  mount(server, static_dir);
  return server.listen(host, port);
}

}  // namespace socnav
