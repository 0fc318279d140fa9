#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "socnav/app.hpp"
#include "socnav/error.hpp"
#include "socnav/oracle.hpp"

namespace py = pybind11;
using namespace socnav;

// Documents cross the boundary as JSON text; the Python package decodes them.
namespace {

Scenario scenario_of(const std::string& doc) { return scenario_from_json(Json::parse(doc)); }
Path path_of(const std::string& doc) { return path_from_json(Json::parse(doc)); }
AppConfig config_of(const std::string& doc) { return doc.empty() ? AppConfig{} : config_from_json(Json::parse(doc)); }

std::vector<std::string> generate(int count, int width, int height, int pedestrians, std::uint64_t seed,
                                  bool empty_map) {
  GenerateOptions o;
  o.count = count;
  o.width = width;
  o.height = height;
  o.pedestrian_count = pedestrians;
  o.seed = seed;
  o.empty_map = empty_map;
  std::vector<std::string> out;
  for (const Scenario& s : generate_scenarios(o)) out.push_back(scenario_to_json(s).dump());
  return out;
}

std::string demo(const std::string& scenario, const std::string& config) {
  const AppConfig c = config_of(config);
  const World w(scenario_of(scenario), c.features);
  return path_to_json(oracle_demo(w, c.oracle)).dump();
}

std::optional<std::string> plan(const std::string& scenario, const std::string& planner,
                                const std::optional<std::string>& model, const std::string& config,
                                std::optional<std::uint64_t> seed) {
  const AppConfig c = config_of(config);
  PlannerConfig pc = c.planner;
  if (seed) pc.seed = *seed;
  std::optional<GanPair> pair;
  if (model) pair = pair_from_json(Json::parse(*model));
  const World w(scenario_of(scenario), c.features);
  PlanResult r;
  {
    py::gil_scoped_release release;
    r = run_planner(planner_kind_from_string(planner), w, pair ? &*pair : nullptr, pc);
  }
  if (!r.success()) return std::nullopt;
  return path_to_json(*r.path).dump();
}

std::string evaluate(const std::string& scenario, const std::string& demo_doc, const std::string& plan_doc,
                     const std::string& config) {
  const AppConfig c = config_of(config);
  const World w(scenario_of(scenario), c.features);
  return metric_report_to_json(evaluate_pair(w, path_of(demo_doc), path_of(plan_doc), c.metrics)).dump();
}

std::string train_dir(const std::string& scenarios, const std::string& demos, const std::string& out,
                  const std::string& split, std::uint64_t seed, const std::string& config) {
  TrainRequest req;
  req.scenarios = scenarios;
  req.demos = demos;
  req.out = out;
  req.split = split;
  req.seed = seed;
  py::gil_scoped_release release;
  return train_report_to_json(run_train(req, config_of(config))).dump();
}

}  // namespace

PYBIND11_MODULE(_socnav, m) {
  m.doc() = "Socially adaptive path planning core";

  // Message format is "code: field: detail".
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("generate", &generate, py::arg("count"), py::arg("width"), py::arg("height"), py::arg("pedestrians"),
        py::arg("seed"), py::arg("empty_map"));
  m.def("oracle_demo", &demo, py::arg("scenario"), py::arg("config") = "");
  m.def("plan", &plan, py::arg("scenario"), py::arg("planner"), py::arg("model") = py::none(),
        py::arg("config") = "", py::arg("seed") = py::none());
  m.def("evaluate", &evaluate, py::arg("scenario"), py::arg("demo"), py::arg("plan"), py::arg("config") = "");
  m.def("h_signature", [](const std::string& s, const std::string& p, bool peds) {
    return h_signature(scenario_of(s), path_of(p), peds).word;
  }, py::arg("scenario"), py::arg("path"), py::arg("include_pedestrians") = true);
  m.def("same_homotopy", [](const std::string& s, const std::string& a, const std::string& b) {
    return same_homotopy(scenario_of(s), path_of(a), path_of(b));
  }, py::arg("scenario"), py::arg("a"), py::arg("b"));
  m.def("dissimilarity", [](const std::string& a, const std::string& b, bool symmetric) {
    return dissimilarity(path_of(a), path_of(b), symmetric);
  }, py::arg("a"), py::arg("b"), py::arg("symmetric") = false);
  m.def("features", [](const std::string& s, double x, double y, const std::string& config) {
    const AppConfig c = config_of(config);
    const World w(scenario_of(s), c.features);
    const FeatureVector f = w.features_at({x, y});
    return std::vector<double>(f.begin(), f.end());
  }, py::arg("scenario"), py::arg("x"), py::arg("y"), py::arg("config") = "");
  m.def("create_pair", [](std::uint64_t seed) { return pair_to_json(GanPair::create(seed)).dump(); }, py::arg("seed"));
  m.def("train", &train_dir, py::arg("scenarios"), py::arg("demos"), py::arg("out"), py::arg("split") = "75:25",
        py::arg("seed") = 0, py::arg("config") = "");
  m.def("default_config", [] { return config_to_json(AppConfig{}).dump(); });
}
