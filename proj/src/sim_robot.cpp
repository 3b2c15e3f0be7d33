#include "gestos/sim_robot.hpp"

#include "httplib.h"
#include "json.hpp"

namespace gestos {

using nlohmann::json;

SimulatedRobot::SimulatedRobot(SimScenario scenario)
    : scenario_(std::move(scenario)), server_(std::make_unique<httplib::Server>()) {}

SimulatedRobot::~SimulatedRobot() { stop(); }

void SimulatedRobot::start(int port) {
  server_->Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    SimScenario snapshot;
    {
      std::lock_guard lock(mu_);
      snapshot = scenario_;
    }
    nlohmann::ordered_json body;
    body["status"] = to_string(snapshot.status);
    body["load"] = snapshot.load;
    body["detail"] = snapshot.detail;
    res.set_content(body.dump(), "application/json");
  });

  server_->Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
    const json doc = json::parse(req.body, nullptr, false);
    nlohmann::ordered_json body;
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("dispatch_id") ||
        !doc.contains("command_id") || !doc["command_id"].is_string()) {
      body["status"] = "rejected";
      body["detail"] = "malformed command body";
      res.status = 400;
      res.set_content(body.dump(), "application/json");
      return;
    }
    ReceivedCommand received;
    received.dispatch_id =
        doc["dispatch_id"].is_string() ? doc["dispatch_id"].get<std::string>() : "";
    received.command_id = doc["command_id"].get<std::string>();
    received.params_json = doc.contains("params") ? doc["params"].dump() : "{}";

    bool reject = false;
    std::string detail;
    {
      std::lock_guard lock(mu_);
      received_.push_back(received);
      reject = scenario_.reject_all ||
               scenario_.reject_commands.contains(received.command_id);
      detail = scenario_.detail;
    }
    if (reject) {
      body["status"] = "rejected";
      body["detail"] = detail.empty() ? "command rejected by scenario" : detail;
    } else {
      body["status"] = "accepted";
    }
    res.set_content(body.dump(), "application/json");
  });

  if (port == 0) {
    const int bound = server_->bind_to_any_port("127.0.0.1");
    if (bound <= 0) throw BindFailure("simulated robot cannot bind a loopback port");
    port_ = bound;
  } else {
    if (!server_->bind_to_port("127.0.0.1", port)) {
      throw BindFailure("simulated robot cannot bind 127.0.0.1:" +
                        std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void SimulatedRobot::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string SimulatedRobot::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void SimulatedRobot::set_scenario(SimScenario scenario) {
  std::lock_guard lock(mu_);
  scenario_ = std::move(scenario);
}

SimScenario SimulatedRobot::scenario() const {
  std::lock_guard lock(mu_);
  return scenario_;
}

std::vector<ReceivedCommand> SimulatedRobot::received() const {
  std::lock_guard lock(mu_);
  return received_;
}

size_t SimulatedRobot::received_count() const {
  std::lock_guard lock(mu_);
  return received_.size();
}

void SimulatedRobot::clear_received() {
  std::lock_guard lock(mu_);
  received_.clear();
}

}  // namespace gestos
