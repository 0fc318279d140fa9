#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "socnav/irl.hpp"
#include "socnav/metrics.hpp"
#include "socnav/oracle.hpp"
#include "socnav/planner.hpp"
#include "socnav/scenario.hpp"
#include "socnav/tinynet.hpp"

namespace socnav {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kModelFormatVersion = 1;

Json scenario_to_json(const Scenario& s);
// Checks the document shape and every scenario invariant.
Scenario scenario_from_json(const Json& j);

Json path_to_json(const Path& p);
// Shape checks plus the two-point minimum; collision checks need the scenario.
Path path_from_json(const Json& j);

Json mlp_to_json(const Mlp& m);
Mlp mlp_from_json(const Json& j, const std::string& field = "model");
Json pair_to_json(const GanPair& p);
GanPair pair_from_json(const Json& j);

// All configuration blocks of the trainer config file. Every block and key is
// optional; unknown keys are an error.
struct AppConfig {
  PlannerConfig planner;
  FeatureConfig features;
  OracleConfig oracle;
  TrainConfig train;
  MetricOptions metrics;

  void validate() const;
};

AppConfig config_from_json(const Json& j);
Json config_to_json(const AppConfig& c);
AppConfig load_config(const fs::path& file);  // empty path gives the defaults

struct EvalEntry {
  std::string planner;
  std::uint64_t seed = 0;
  std::vector<MetricReport> reports;
  std::vector<std::string> failed;  // scenarios the planner could not solve
  MetricAggregate aggregate;
};

Json metric_report_to_json(const MetricReport& r);
Json aggregate_to_json(const MetricAggregate& a);
Json eval_to_json(const std::vector<EvalEntry>& entries);
std::string eval_to_csv(const std::vector<EvalEntry>& entries);

Json train_report_to_json(const TrainReport& r);
std::string train_report_to_csv(const TrainReport& r);
Json epoch_row_to_json(const EpochRow& r);

// Files. Writes go to a temporary sibling, are flushed to disk and renamed.
std::string read_text(const fs::path& file);
Json read_json(const fs::path& file);
void write_text(const fs::path& file, const std::string& text);
void write_json(const fs::path& file, const Json& j);
// Sorted *.json files of a directory.
std::vector<fs::path> json_files(const fs::path& dir);

Scenario load_scenario(const fs::path& file);
Path load_path(const fs::path& file);
GanPair load_pair(const fs::path& file);
std::vector<Scenario> load_scenarios(const fs::path& dir);
// Paths keyed by scenario id; throws Error(scenario_mismatch) when one is missing.
std::vector<Path> load_paths_for(const fs::path& dir, const std::vector<Scenario>& scenarios);

}  // namespace socnav
