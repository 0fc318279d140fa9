#include "socnav/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include "socnav/error.hpp"

namespace socnav {

namespace {

Error malformed(const std::string& field, const std::string& detail) {
  return Error(errc::malformed_document, field, detail);
}

const Json& member(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) throw malformed(ctx, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw malformed(ctx.empty() ? key : ctx + "." + key, "missing");
  return *it;
}

std::string join(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw malformed(field, "expected a number");
  return j.get<double>();
}

double number_at(const Json& j, const char* key, const std::string& ctx) {
  return number(member(j, key, ctx), join(ctx, key));
}

long long integer(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw malformed(field, "expected an integer");
  return j.get<long long>();
}

int int_at(const Json& j, const char* key, const std::string& ctx) {
  return static_cast<int>(integer(member(j, key, ctx), join(ctx, key)));
}

std::string string_at(const Json& j, const char* key, const std::string& ctx) {
  const Json& v = member(j, key, ctx);
  if (!v.is_string()) throw malformed(join(ctx, key), "expected a string");
  return v.get<std::string>();
}

Vec2 point(const Json& j, const std::string& field) {
  return {number_at(j, "x", field), number_at(j, "y", field)};
}

Json point_json(Vec2 p) { return Json{{"x", p.x}, {"y", p.y}}; }

}  // namespace

Json scenario_to_json(const Scenario& s) {
  Json rle = Json::array();
  const auto& cells = s.grid.cells;
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    rle.push_back(Json::array({static_cast<int>(cells[i]), j - i}));
    i = j;
  }
  Json peds = Json::array();
  for (const Pedestrian& p : s.pedestrians) {
    peds.push_back(
        {{"x", p.x}, {"y", p.y}, {"heading", p.heading}, {"speed", p.speed}, {"body_radius", p.body_radius}});
  }
  return Json{{"id", s.id},
              {"width", s.grid.width},
              {"height", s.grid.height},
              {"resolution", s.grid.resolution},
              {"occupancy_rle", rle},
              {"pedestrians", peds},
              {"start", point_json(s.start)},
              {"goal", point_json(s.goal)},
              {"goal_radius", s.goal_radius},
              {"robot_radius", s.robot_radius}};
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw malformed("scenario", "expected an object");
  Scenario s;
  s.id = string_at(j, "id", "");
  s.grid.width = int_at(j, "width", "");
  s.grid.height = int_at(j, "height", "");
  s.grid.resolution = number_at(j, "resolution", "");
  if (s.grid.width < 8 || s.grid.height < 8) throw Error(errc::invariant_violation, "width/height", "must be >= 8");
  const std::size_t expected = static_cast<std::size_t>(s.grid.width) * static_cast<std::size_t>(s.grid.height);
  const Json& rle = member(j, "occupancy_rle", "");
  if (!rle.is_array()) throw malformed("occupancy_rle", "expected an array of [value, count] runs");
  s.grid.cells.reserve(expected);
  for (std::size_t k = 0; k < rle.size(); ++k) {
    const std::string field = "occupancy_rle[" + std::to_string(k) + "]";
    const Json& run = rle[k];
    if (!run.is_array() || run.size() != 2) throw malformed(field, "expected [value, count]");
    const long long v = integer(run[0], field + "[0]");
    const long long c = integer(run[1], field + "[1]");
    if (v != 0 && v != 1) throw malformed(field + "[0]", "value must be 0 or 1");
    if (c < 1) throw malformed(field + "[1]", "count must be >= 1");
    if (s.grid.cells.size() + static_cast<std::size_t>(c) > expected)
      throw Error(errc::rle_length_mismatch, "occupancy_rle", "runs exceed width * height = " + std::to_string(expected));
    s.grid.cells.insert(s.grid.cells.end(), static_cast<std::size_t>(c), static_cast<std::uint8_t>(v));
  }
  if (s.grid.cells.size() != expected) {
    throw Error(errc::rle_length_mismatch, "occupancy_rle",
                "runs sum to " + std::to_string(s.grid.cells.size()) + ", expected " + std::to_string(expected));
  }
  const Json& peds = member(j, "pedestrians", "");
  if (!peds.is_array()) throw malformed("pedestrians", "expected an array");
  for (std::size_t k = 0; k < peds.size(); ++k) {
    const std::string field = "pedestrians[" + std::to_string(k) + "]";
    Pedestrian p;
    p.x = number_at(peds[k], "x", field);
    p.y = number_at(peds[k], "y", field);
    p.heading = number_at(peds[k], "heading", field);
    p.speed = peds[k].contains("speed") ? number_at(peds[k], "speed", field) : 0.0;
    p.body_radius = peds[k].contains("body_radius") ? number_at(peds[k], "body_radius", field) : 0.3;
    s.pedestrians.push_back(p);
  }
  s.start = point(member(j, "start", ""), "start");
  s.goal = point(member(j, "goal", ""), "goal");
  if (j.contains("goal_radius")) s.goal_radius = number_at(j, "goal_radius", "");
  if (j.contains("robot_radius")) s.robot_radius = number_at(j, "robot_radius", "");
  s.validate();
  return s;
}

Json path_to_json(const Path& p) {
  Json pts = Json::array();
  for (const Vec2& v : p.points) pts.push_back(point_json(v));
  return Json{{"scenario_id", p.scenario_id}, {"source", to_string(p.source)}, {"points", pts}};
}

Path path_from_json(const Json& j) {
  if (!j.is_object()) throw malformed("path", "expected an object");
  Path p;
  p.scenario_id = string_at(j, "scenario_id", "");
  p.source = path_source_from_string(string_at(j, "source", ""));
  const Json& pts = member(j, "points", "");
  if (!pts.is_array()) throw malformed("points", "expected an array");
  for (std::size_t k = 0; k < pts.size(); ++k) p.points.push_back(point(pts[k], "points[" + std::to_string(k) + "]"));
  if (p.points.size() < 2) throw Error(errc::invariant_violation, "points", "a path needs at least 2 points");
  return p;
}

Json mlp_to_json(const Mlp& m) {
  return Json{{"layers", m.layers},
              {"weights", m.params.weights},
              {"biases", m.params.biases},
              {"format_version", kModelFormatVersion}};
}

Mlp mlp_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) throw malformed(field, "expected an object");
  if (int_at(j, "format_version", field) != kModelFormatVersion)
    throw malformed(join(field, "format_version"), "unsupported version");
  const Json& layers = member(j, "layers", field);
  if (!layers.is_array() || layers.size() < 2) throw malformed(join(field, "layers"), "expected at least two sizes");
  std::vector<int> sizes;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const long long v = integer(layers[k], join(field, "layers[" + std::to_string(k) + "]"));
    if (v < 1) throw Error(errc::dimension_mismatch, join(field, "layers"), "sizes must be >= 1");
    sizes.push_back(static_cast<int>(v));
  }
  Mlp m = Mlp::zeros(sizes);
  const auto fill = [&](const char* key, std::vector<std::vector<double>>& dst) {
    const Json& arr = member(j, key, field);
    const std::string f = join(field, key);
    if (!arr.is_array() || arr.size() != dst.size())
      throw Error(errc::dimension_mismatch, f, "expected " + std::to_string(dst.size()) + " layers");
    for (std::size_t l = 0; l < dst.size(); ++l) {
      const Json& row = arr[l];
      if (!row.is_array() || row.size() != dst[l].size())
        throw Error(errc::dimension_mismatch, f + "[" + std::to_string(l) + "]",
                    "expected " + std::to_string(dst[l].size()) + " values");
      for (std::size_t i = 0; i < row.size(); ++i) dst[l][i] = number(row[i], f);
    }
  };
  fill("weights", m.params.weights);
  fill("biases", m.params.biases);
  if (!m.params.all_finite()) throw Error(errc::invariant_violation, field, "non-finite parameter");
  return m;
}

Json pair_to_json(const GanPair& p) {
  return Json{{"format_version", kModelFormatVersion},
              {"seed", p.seed},
              {"generator", mlp_to_json(p.generator)},
              {"discriminator", mlp_to_json(p.discriminator)}};
}

GanPair pair_from_json(const Json& j) {
  if (!j.is_object()) throw malformed("model", "expected an object");
  GanPair p;
  p.generator = mlp_from_json(member(j, "generator", ""), "generator");
  p.discriminator = mlp_from_json(member(j, "discriminator", ""), "discriminator");
  if (p.generator.layers.front() != static_cast<int>(kFeatureCount) || p.generator.layers.back() != 1)
    throw Error(errc::dimension_mismatch, "generator.layers", "generator must map 5 features to 1 cost");
  if (p.discriminator.layers.front() != static_cast<int>(kFeatureCount) + 1 || p.discriminator.layers.back() != 1)
    throw Error(errc::dimension_mismatch, "discriminator.layers", "discriminator must map 6 inputs to 1 score");
  if (j.contains("seed")) p.seed = member(j, "seed", "").get<std::uint64_t>();
  p.reset_momentum();
  return p;
}

namespace {

// Reads the keys of one config block, rejecting anything unknown.
class Block {
 public:
  Block(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j.is_object()) throw Error(errc::invalid_config, name_, "expected an object");
  }
  ~Block() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw Error(errc::invalid_config, name_ + "." + k, "unknown key");
    }
  }
  void get(const char* key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw Error(errc::invalid_config, name_ + "." + key, "expected a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) throw Error(errc::invalid_config, name_ + "." + key, "expected an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) throw Error(errc::invalid_config, name_ + "." + key, "expected an unsigned integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) throw Error(errc::invalid_config, name_ + "." + key, "expected a boolean");
      out = v->get<bool>();
    }
  }
  void get(const char* key, GeneratorLoss& out) {
    if (const Json* v = find(key)) {
      const std::string s = v->is_string() ? v->get<std::string>() : "";
      if (s == "non_saturating") {
        out = GeneratorLoss::non_saturating;
      } else if (s == "literal") {
        out = GeneratorLoss::literal;
      } else {
        throw Error(errc::invalid_config, name_ + "." + key, "expected \"non_saturating\" or \"literal\"");
      }
    }
  }

 private:
  const Json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

void AppConfig::validate() const {
  planner.validate();
  features.validate();
  oracle.validate();
  train.validate();
  if (!(metrics.feature_spacing > 0.0)) throw Error(errc::invalid_config, "metrics.feature_spacing", "must be > 0");
}

AppConfig config_from_json(const Json& j) {
  AppConfig c;
  if (!j.is_object()) throw Error(errc::invalid_config, "config", "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "planner") {
      Block b(v, k);
      b.get("max_iterations", c.planner.max_iterations);
      b.get("steer_step", c.planner.steer_step);
      b.get("near_radius", c.planner.near_radius);
      b.get("goal_bias", c.planner.goal_bias);
      b.get("cost_weight", c.planner.cost_weight);
      b.get("discriminator_gate", c.planner.discriminator_gate);
      b.get("seed", c.planner.seed);
    } else if (k == "features") {
      Block b(v, k);
      b.get("sigma_front", c.features.sigma_front);
      b.get("sigma_back", c.features.sigma_back);
      b.get("sigma_side", c.features.sigma_side);
      b.get("sigma_side_lon", c.features.sigma_side_lon);
      b.get("d_clamp", c.features.d_clamp);
      b.get("lateral_symmetric", c.features.lateral_symmetric);
    } else if (k == "oracle") {
      Block b(v, k);
      b.get("w_clearance", c.oracle.w_clearance);
      b.get("w_pedestrian", c.oracle.w_pedestrian);
      b.get("connectivity", c.oracle.connectivity);
      b.get("smooth", c.oracle.smooth);
    } else if (k == "train") {
      Block b(v, k);
      TrainConfig& t = c.train;
      b.get("epochs_max", t.epochs_max);
      b.get("repetitions", t.repetitions);
      b.get("minibatch", t.minibatch);
      b.get("lr_g", t.lr_g);
      b.get("lr_d", t.lr_d);
      b.get("momentum", t.momentum);
      b.get("d_steps_per_g_step", t.d_steps_per_g_step);
      b.get("pretrain_samples", t.pretrain_samples);
      b.get("pretrain_passes", t.pretrain_passes);
      b.get("pretrain_lr", t.pretrain_lr);
      b.get("patience", t.patience);
      b.get("resample_spacing", t.resample_spacing);
      b.get("val_fraction", t.val_fraction);
      b.get("generator_loss", t.generator_loss);
      b.get("tree_nodes", t.tree_nodes);
      b.get("accumulate", t.accumulate);
      b.get("seed", t.seed);
    } else if (k == "metrics") {
      Block b(v, k);
      b.get("include_pedestrians", c.metrics.include_pedestrians);
      b.get("symmetric_dissimilarity", c.metrics.symmetric_dissimilarity);
      b.get("feature_spacing", c.metrics.feature_spacing);
    } else {
      throw Error(errc::invalid_config, k, "unknown config block");
    }
  }
  c.validate();
  return c;
}

Json config_to_json(const AppConfig& c) {
  const PlannerConfig& p = c.planner;
  const FeatureConfig& f = c.features;
  const OracleConfig& o = c.oracle;
  const TrainConfig& t = c.train;
  return Json{
      {"planner",
       {{"max_iterations", p.max_iterations},
        {"steer_step", p.steer_step},
        {"near_radius", p.near_radius},
        {"goal_bias", p.goal_bias},
        {"cost_weight", p.cost_weight},
        {"discriminator_gate", p.discriminator_gate},
        {"seed", p.seed}}},
      {"features",
       {{"sigma_front", f.sigma_front},
        {"sigma_back", f.sigma_back},
        {"sigma_side", f.sigma_side},
        {"sigma_side_lon", f.sigma_side_lon},
        {"d_clamp", f.d_clamp},
        {"lateral_symmetric", f.lateral_symmetric}}},
      {"oracle",
       {{"w_clearance", o.w_clearance},
        {"w_pedestrian", o.w_pedestrian},
        {"connectivity", o.connectivity},
        {"smooth", o.smooth}}},
      {"train",
       {{"epochs_max", t.epochs_max},
        {"repetitions", t.repetitions},
        {"minibatch", t.minibatch},
        {"lr_g", t.lr_g},
        {"lr_d", t.lr_d},
        {"momentum", t.momentum},
        {"d_steps_per_g_step", t.d_steps_per_g_step},
        {"pretrain_samples", t.pretrain_samples},
        {"pretrain_passes", t.pretrain_passes},
        {"pretrain_lr", t.pretrain_lr},
        {"patience", t.patience},
        {"resample_spacing", t.resample_spacing},
        {"val_fraction", t.val_fraction},
        {"generator_loss", t.generator_loss == GeneratorLoss::literal ? "literal" : "non_saturating"},
        {"tree_nodes", t.tree_nodes},
        {"accumulate", t.accumulate},
        {"seed", t.seed}}},
      {"metrics",
       {{"include_pedestrians", c.metrics.include_pedestrians},
        {"symmetric_dissimilarity", c.metrics.symmetric_dissimilarity},
        {"feature_spacing", c.metrics.feature_spacing}}}};
}

AppConfig load_config(const fs::path& file) {
  if (file.empty()) return AppConfig{};
  try {
    return config_from_json(read_json(file));
  } catch (const Error& e) {
    if (e.code() == errc::malformed_document) throw Error(errc::invalid_config, e.field(), e.what());
    throw;
  }
}

Json metric_report_to_json(const MetricReport& r) {
  return Json{{"scenario_id", r.scenario_id},
              {"dissimilarity", r.dissimilarity},
              {"feature_difference", r.feature_difference},
              {"homotopic", r.homotopic},
              {"path_length_demo", r.path_length_demo},
              {"path_length_plan", r.path_length_plan}};
}

Json aggregate_to_json(const MetricAggregate& a) {
  return Json{{"homotopy_rate", a.homotopy_rate},
              {"mean_dissimilarity", a.mean_dissimilarity},
              {"feature_difference", a.feature_difference}};
}

Json eval_to_json(const std::vector<EvalEntry>& entries) {
  Json out = Json::array();
  for (const EvalEntry& e : entries) {
    Json reports = Json::array();
    for (const MetricReport& r : e.reports) reports.push_back(metric_report_to_json(r));
    out.push_back({{"planner", e.planner}, {"seed", e.seed}, {"reports", reports}, {"failed", e.failed}, {"aggregate", aggregate_to_json(e.aggregate)}});
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string eval_to_csv(const std::vector<EvalEntry>& entries) {
  std::ostringstream os;
  os << "planner,seed,scenario_id,dissimilarity,feature_difference,homotopic,path_length_demo,path_length_plan\n";
  for (const EvalEntry& e : entries) {
    for (const MetricReport& r : e.reports) {
      os << e.planner << ',' << e.seed << ',' << r.scenario_id << ',' << fmt(r.dissimilarity) << ','
         << fmt(r.feature_difference) << ',' << (r.homotopic ? 1 : 0) << ',' << fmt(r.path_length_demo) << ','
         << fmt(r.path_length_plan) << '\n';
    }
  }
  return os.str();
}

Json epoch_row_to_json(const EpochRow& r) {
  return Json{{"epoch", r.epoch},
              {"d_loss", r.d_loss},
              {"g_loss", r.g_loss},
              {"train_homotopy_rate", r.train_homotopy_rate},
              {"val_homotopy_rate", r.val_homotopy_rate},
              {"val_dissimilarity", r.val_dissimilarity},
              {"rollouts", r.rollouts},
              {"failures", r.failures},
              {"improved", r.improved}};
}

Json train_report_to_json(const TrainReport& r) {
  Json rows = Json::array();
  for (const EpochRow& e : r.epochs) rows.push_back(epoch_row_to_json(e));
  return Json{{"pretrain",
               {{"passes", r.pretrain.passes},
                {"mse", r.pretrain.mse},
                {"d_loss", r.pretrain.d_loss},
                {"warning", r.pretrain.warning}}},
              {"baseline_val_homotopy_rate", r.baseline_val_homotopy_rate},
              {"baseline_val_dissimilarity", r.baseline_val_dissimilarity},
              {"epochs", rows},
              {"best_epoch", r.best_epoch},
              {"stopping_epoch", r.stopping_epoch},
              {"stopping_reason", r.stopping_reason}};
}

std::string train_report_to_csv(const TrainReport& r) {
  std::ostringstream os;
  os << "epoch,d_loss,g_loss,train_homotopy_rate,val_homotopy_rate,val_dissimilarity,rollouts,failures,improved\n";
  for (const EpochRow& e : r.epochs) {
    os << e.epoch << ',' << fmt(e.d_loss) << ',' << fmt(e.g_loss) << ',' << fmt(e.train_homotopy_rate) << ','
       << fmt(e.val_homotopy_rate) << ',' << fmt(e.val_dissimilarity) << ',' << e.rollouts << ',' << e.failures << ','
       << (e.improved ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(errc::io_error, file.string(), "cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json(const fs::path& file) {
  const std::string text = read_text(file);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw malformed(file.string(), "not valid JSON");
  return j;
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  const fs::path tmp = file.string() + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw Error(errc::io_error, file.string(), "cannot open for writing");
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() && std::fflush(f) == 0 &&
                  ::fsync(::fileno(f)) == 0;
  std::fclose(f);
  if (!ok) throw Error(errc::io_error, file.string(), "write failed");
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw Error(errc::io_error, file.string(), ec.message());
}

void write_json(const fs::path& file, const Json& j) { write_text(file, j.dump(2) + "\n"); }

std::vector<fs::path> json_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(errc::io_error, dir.string(), "not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

template <class F>
auto with_file(const fs::path& file, F&& f) {
  try {
    return f(read_json(file));
  } catch (const Error& e) {
    if (e.code() == errc::io_error || e.field() == file.string()) throw;
    throw Error(e.code(), file.filename().string() + ":" + e.field(), e.what());
  }
}

}  // namespace

Scenario load_scenario(const fs::path& file) { return with_file(file, scenario_from_json); }
Path load_path(const fs::path& file) { return with_file(file, path_from_json); }
GanPair load_pair(const fs::path& file) { return with_file(file, pair_from_json); }

std::vector<Scenario> load_scenarios(const fs::path& dir) {
  std::vector<Scenario> out;
  for (const fs::path& f : json_files(dir)) out.push_back(load_scenario(f));
  if (out.empty()) throw Error(errc::empty_batch, dir.string(), "no scenario files");
  return out;
}

std::vector<Path> load_paths_for(const fs::path& dir, const std::vector<Scenario>& scenarios) {
  std::map<std::string, Path> by_id;
  for (const fs::path& f : json_files(dir)) {
    Path p = load_path(f);
    by_id[p.scenario_id] = std::move(p);
  }
  std::vector<Path> out;
  for (const Scenario& s : scenarios) {
    const auto it = by_id.find(s.id);
    if (it == by_id.end()) throw Error(errc::scenario_mismatch, dir.string(), "no path for scenario '" + s.id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace socnav
