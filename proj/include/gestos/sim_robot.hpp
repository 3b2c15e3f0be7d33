#pragma once

#include "gestos/registry.hpp"
#include "gestos/types.hpp"

#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace gestos {

struct BindFailure : Error {
  using Error::Error;
};

// Scripted behavior for a simulated robot.
struct SimScenario {
  RobotStatus status = RobotStatus::kOperational;
  double load = 0.0;
  std::string detail;
  bool reject_all = false;
  std::set<std::string> reject_commands;
};

struct ReceivedCommand {
  std::string dispatch_id;
  std::string command_id;
  std::string params_json;
};

// In-process HTTP robot. Serves GET /state and POST /command on a loopback
// port and records every command it receives. Stands in for fleet hardware
// in tests and the evaluation harness.
class SimulatedRobot {
 public:
  explicit SimulatedRobot(SimScenario scenario = {});
  ~SimulatedRobot();

  SimulatedRobot(const SimulatedRobot&) = delete;
  SimulatedRobot& operator=(const SimulatedRobot&) = delete;

  // Binds 127.0.0.1 (a free port when port == 0) and starts serving.
  // Throws BindFailure.
  void start(int port = 0);
  void stop();

  int port() const { return port_; }
  std::string endpoint() const;  // http://127.0.0.1:<port>

  void set_scenario(SimScenario scenario);
  SimScenario scenario() const;

  std::vector<ReceivedCommand> received() const;
  size_t received_count() const;
  void clear_received();

 private:
  mutable std::mutex mu_;
  SimScenario scenario_;
  std::vector<ReceivedCommand> received_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace gestos
