#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "socnav/app.hpp"

namespace httplib {
class Server;
}

namespace socnav {

struct TrainJob {
  std::string id;
  std::string state = "queued";  // queued | running | done | failed
  int epochs_done = 0;
  int epochs_max = 0;
  std::vector<EpochRow> rows;
  std::string error;
  std::atomic<bool> cancel{false};
};

// HTTP/JSON facade over a state directory laid out like the CLI directories:
// scenarios/, demos/, plans/<planner>/, models/.
class Service {
 public:
  Service(fs::path state, AppConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server, const std::optional<fs::path>& static_dir = std::nullopt);
  // Blocks until the server stops.
  bool listen(const std::string& host, int port, const std::optional<fs::path>& static_dir = std::nullopt);
  void wait_for_training();

 private:
  Json list_scenarios() const;
  Json scenario_doc(const std::string& id) const;
  Json create_scenario(const Json& body);
  Json add_demo(const std::string& id, const Json& body);
  Json paths_of(const std::string& id) const;
  Json plan(const std::string& id, const Json& body);
  Json start_training(const Json& body);
  Json job_doc(const std::string& id) const;
  Json cancel_job(const std::string& id);
  Json list_models() const;

  Scenario load(const std::string& id) const;
  fs::path model_file(const std::string& name) const;

  fs::path state_;
  AppConfig config_;
  mutable std::mutex write_mutex_;
  mutable std::mutex jobs_mutex_;
  std::map<std::string, std::shared_ptr<TrainJob>> jobs_;
  int next_job_ = 1;
  std::thread worker_;
};

}  // namespace socnav
