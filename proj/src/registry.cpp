#include "gestos/registry.hpp"

#include "httplib.h"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace gestos {
namespace {

using nlohmann::json;

void validate_profile(const RobotProfile& p) {
  if (p.id.empty()) throw InvalidProfile("robot id must be non-empty");
  if (p.endpoint.empty()) throw InvalidProfile("robot '" + p.id + "' has no endpoint");
  if (p.capacity < 1) throw InvalidProfile("robot '" + p.id + "' capacity must be >= 1");
  if (p.commands.empty()) throw InvalidProfile("robot '" + p.id + "' has no commands");
  std::unordered_set<std::string> command_ids;
  for (const CommandSchema& c : p.commands) {
    if (c.id.empty()) throw InvalidProfile("robot '" + p.id + "' has a command without id");
    if (!command_ids.insert(c.id).second) {
      throw InvalidProfile("robot '" + p.id + "' duplicates command '" + c.id + "'");
    }
    std::unordered_set<std::string> param_names;
    for (const CommandParam& prm : c.params) {
      if (prm.name.empty() || !param_names.insert(prm.name).second) {
        throw InvalidProfile("command '" + c.id + "' has duplicate or empty param names");
      }
    }
  }
}

// Splits "http://host:port/base" into httplib client target + path prefix.
bool split_endpoint(const std::string& endpoint, std::string* origin, std::string* base) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) return false;
  const auto path = endpoint.find('/', scheme + 3);
  if (path == std::string::npos) {
    *origin = endpoint;
    base->clear();
  } else {
    *origin = endpoint.substr(0, path);
    *base = endpoint.substr(path);
    while (!base->empty() && base->back() == '/') base->pop_back();
  }
  return true;
}

}  // namespace

std::string to_string(ParamType t) {
  switch (t) {
    case ParamType::kString:
      return "string";
    case ParamType::kNumber:
      return "number";
    case ParamType::kBoolean:
      return "boolean";
    case ParamType::kEnum:
      return "enum";
  }
  return "string";
}

std::optional<ParamType> param_type_from_string(const std::string& s) {
  if (s == "string") return ParamType::kString;
  if (s == "number") return ParamType::kNumber;
  if (s == "boolean") return ParamType::kBoolean;
  if (s == "enum") return ParamType::kEnum;
  return std::nullopt;
}

std::string to_string(RobotStatus s) {
  switch (s) {
    case RobotStatus::kOperational:
      return "operational";
    case RobotStatus::kBusy:
      return "busy";
    case RobotStatus::kFault:
      return "fault";
    case RobotStatus::kOffline:
      return "offline";
  }
  return "offline";
}

std::optional<RobotStatus> robot_status_from_string(const std::string& s) {
  if (s == "operational") return RobotStatus::kOperational;
  if (s == "busy") return RobotStatus::kBusy;
  if (s == "fault") return RobotStatus::kFault;
  if (s == "offline") return RobotStatus::kOffline;
  return std::nullopt;
}

double monotonic_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

void RobotRegistry::register_robot(RobotProfile profile) {
  validate_profile(profile);
  std::unique_lock lock(mu_);
  if (index_.contains(profile.id)) {
    throw DuplicateRobotId("robot '" + profile.id + "' already registered");
  }
  index_.emplace(profile.id, robots_.size());
  robots_.push_back(std::move(profile));
  states_.emplace_back();  // offline until first update
}

void RobotRegistry::update_state(const std::string& robot_id, LiveState state) {
  std::unique_lock lock(mu_);
  const auto it = index_.find(robot_id);
  if (it == index_.end()) throw UnknownRobot("unknown robot '" + robot_id + "'");
  state.load = std::clamp(state.load, 0.0, 1.0);
  state.last_updated = monotonic_seconds();
  states_[it->second] = std::move(state);
}

LiveState RobotRegistry::effective_state_locked(size_t idx, double now) const {
  LiveState s = states_[idx];
  if (s.last_updated < 0.0 || now - s.last_updated > freshness_window_) {
    s.status = RobotStatus::kOffline;
  }
  return s;
}

LiveState RobotRegistry::state(const std::string& robot_id) const {
  std::shared_lock lock(mu_);
  const auto it = index_.find(robot_id);
  if (it == index_.end()) throw UnknownRobot("unknown robot '" + robot_id + "'");
  return effective_state_locked(it->second, monotonic_seconds());
}

std::vector<RobotProfile> RobotRegistry::robots() const {
  std::shared_lock lock(mu_);
  return robots_;
}

std::optional<RobotProfile> RobotRegistry::find_robot(const std::string& robot_id) const {
  std::shared_lock lock(mu_);
  const auto it = index_.find(robot_id);
  if (it == index_.end()) return std::nullopt;
  return robots_[it->second];
}

bool RobotRegistry::has_robot(const std::string& robot_id) const {
  std::shared_lock lock(mu_);
  return index_.contains(robot_id);
}

bool RobotRegistry::has_command(const std::string& robot_id,
                                const std::string& command_id) const {
  std::shared_lock lock(mu_);
  const auto it = index_.find(robot_id);
  if (it == index_.end()) return false;
  const auto& commands = robots_[it->second].commands;
  return std::any_of(commands.begin(), commands.end(),
                     [&command_id](const CommandSchema& c) { return c.id == command_id; });
}

size_t RobotRegistry::size() const {
  std::shared_lock lock(mu_);
  return robots_.size();
}

bool RobotRegistry::any_available() const {
  std::shared_lock lock(mu_);
  const double now = monotonic_seconds();
  for (size_t i = 0; i < robots_.size(); ++i) {
    const LiveState s = effective_state_locked(i, now);
    if (s.status == RobotStatus::kOperational && s.load < 1.0) return true;
  }
  return false;
}

std::vector<std::string> RobotRegistry::available_robots() const {
  std::vector<std::string> out;
  {
    std::shared_lock lock(mu_);
    const double now = monotonic_seconds();
    for (size_t i = 0; i < robots_.size(); ++i) {
      const LiveState s = effective_state_locked(i, now);
      if (s.status == RobotStatus::kOperational && s.load < 1.0) {
        out.push_back(robots_[i].id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RankedCandidate> RobotRegistry::feasible_robots(
    std::span<const RankedCandidate> candidates) const {
  std::shared_lock lock(mu_);
  const double now = monotonic_seconds();
  std::vector<RankedCandidate> kept;
  for (const RankedCandidate& c : candidates) {
    const auto it = index_.find(c.robot_id);
    if (it == index_.end()) continue;
    const auto& commands = robots_[it->second].commands;
    const bool known_command =
        std::any_of(commands.begin(), commands.end(),
                    [&c](const CommandSchema& cs) { return cs.id == c.command_id; });
    if (!known_command) continue;
    const LiveState s = effective_state_locked(it->second, now);
    if (s.status != RobotStatus::kOperational || s.load >= 1.0) continue;
    kept.push_back(c);
  }
  return kept;
}

SelectionScore RobotRegistry::select_robot(std::span<const RankedCandidate> feasible,
                                           const SelectionWeights& weights) const {
  if (feasible.empty()) throw NoFeasibleRobot("no feasible robot for this gesture");

  std::optional<SelectionScore> best;
  {
    std::shared_lock lock(mu_);
    const double now = monotonic_seconds();
    for (const RankedCandidate& c : feasible) {
      const auto it = index_.find(c.robot_id);
      if (it == index_.end()) continue;
      const LiveState s = effective_state_locked(it->second, now);
      SelectionScore score;
      score.robot_id = c.robot_id;
      score.command_id = c.command_id;
      score.match_confidence = c.confidence;
      score.availability = 1.0 - s.load;
      const int total_ranks = std::max(c.rank_total, 1);
      score.context = 1.0 - static_cast<double>(c.rank) / total_ranks;
      score.total = weights.match * score.match_confidence +
                    weights.availability * score.availability +
                    weights.context * score.context;
      const bool wins =
          !best.has_value() || score.total > best->total ||
          (score.total == best->total &&
           std::tie(score.robot_id, score.command_id) <
               std::tie(best->robot_id, best->command_id));
      if (wins) best = std::move(score);
    }
  }
  if (!best.has_value()) throw NoFeasibleRobot("no feasible robot for this gesture");
  return *best;
}

size_t RobotRegistry::poll_states(double timeout_s) {
  const std::vector<RobotProfile> snapshot = robots();
  size_t ok = 0;
  for (const RobotProfile& robot : snapshot) {
    std::string origin;
    std::string base;
    LiveState next;
    next.status = RobotStatus::kOffline;
    bool polled = false;
    if (split_endpoint(robot.endpoint, &origin, &base)) {
      httplib::Client client(origin);
      client.set_connection_timeout(std::chrono::duration<double>(timeout_s));
      client.set_read_timeout(std::chrono::duration<double>(timeout_s));
      if (auto res = client.Get(base + "/state"); res && res->status == 200) {
        const json doc = json::parse(res->body, nullptr, false);
        if (doc.is_object() && doc.contains("status") && doc["status"].is_string() &&
            doc.contains("load") && doc["load"].is_number()) {
          const auto status = robot_status_from_string(doc["status"].get<std::string>());
          if (status.has_value()) {
            next.status = *status;
            next.load = doc["load"].get<double>();
            if (doc.contains("detail") && doc["detail"].is_string()) {
              next.detail = doc["detail"].get<std::string>();
            }
            polled = true;
          }
        }
      }
    }
    if (!polled) next.detail = "state poll failed";
    update_state(robot.id, std::move(next));
    if (polled) ++ok;
  }
  return ok;
}

void RobotRegistry::set_freshness_window(double seconds) {
  std::unique_lock lock(mu_);
  freshness_window_ = seconds;
}

double RobotRegistry::freshness_window() const {
  std::shared_lock lock(mu_);
  return freshness_window_;
}

std::vector<RobotProfile> parse_registry_config(const std::string& json_text) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("robots") ||
      !doc["robots"].is_array()) {
    throw InvalidProfile("registry config must be {\"robots\":[...]}");
  }
  std::vector<RobotProfile> robots;
  for (const json& r : doc["robots"]) {
    RobotProfile p;
    if (!r.is_object() || !r.contains("id") || !r["id"].is_string()) {
      throw InvalidProfile("robot entry missing id");
    }
    p.id = r["id"].get<std::string>();
    if (r.contains("description") && r["description"].is_string()) {
      p.description = r["description"].get<std::string>();
    }
    if (r.contains("capacity")) {
      if (!r["capacity"].is_number_integer()) {
        throw InvalidProfile("robot '" + p.id + "' capacity must be an integer");
      }
      p.capacity = r["capacity"].get<int>();
    }
    if (r.contains("endpoint") && r["endpoint"].is_string()) {
      p.endpoint = r["endpoint"].get<std::string>();
    }
    if (!r.contains("commands") || !r["commands"].is_array()) {
      throw InvalidProfile("robot '" + p.id + "' missing commands");
    }
    for (const json& c : r["commands"]) {
      CommandSchema cs;
      if (!c.is_object() || !c.contains("id") || !c["id"].is_string()) {
        throw InvalidProfile("robot '" + p.id + "' has a malformed command");
      }
      cs.id = c["id"].get<std::string>();
      if (c.contains("description") && c["description"].is_string()) {
        cs.description = c["description"].get<std::string>();
      }
      if (c.contains("params")) {
        if (!c["params"].is_array()) {
          throw InvalidProfile("command '" + cs.id + "' params must be an array");
        }
        for (const json& prm : c["params"]) {
          CommandParam cp;
          if (!prm.is_object() || !prm.contains("name") || !prm["name"].is_string() ||
              !prm.contains("type") || !prm["type"].is_string()) {
            throw InvalidProfile("command '" + cs.id + "' has a malformed param");
          }
          cp.name = prm["name"].get<std::string>();
          const auto type = param_type_from_string(prm["type"].get<std::string>());
          if (!type.has_value()) {
            throw InvalidProfile("param '" + cp.name + "' has unknown type");
          }
          cp.type = *type;
          if (prm.contains("required") && prm["required"].is_boolean()) {
            cp.required = prm["required"].get<bool>();
          }
          cs.params.push_back(std::move(cp));
        }
      }
      p.commands.push_back(std::move(cs));
    }
    validate_profile(p);
    robots.push_back(std::move(p));
  }
  return robots;
}

std::string serialize_registry_config(std::span<const RobotProfile> robots) {
  nlohmann::ordered_json doc;
  doc["robots"] = nlohmann::ordered_json::array();
  for (const RobotProfile& p : robots) {
    nlohmann::ordered_json r;
    r["id"] = p.id;
    r["description"] = p.description;
    r["capacity"] = p.capacity;
    r["endpoint"] = p.endpoint;
    r["commands"] = nlohmann::ordered_json::array();
    for (const CommandSchema& c : p.commands) {
      nlohmann::ordered_json cj;
      cj["id"] = c.id;
      cj["description"] = c.description;
      cj["params"] = nlohmann::ordered_json::array();
      for (const CommandParam& prm : c.params) {
        nlohmann::ordered_json pj;
        pj["name"] = prm.name;
        pj["type"] = to_string(prm.type);
        pj["required"] = prm.required;
        cj["params"].push_back(std::move(pj));
      }
      r["commands"].push_back(std::move(cj));
    }
    doc["robots"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

std::vector<RobotProfile> load_registry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidProfile("cannot read registry config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_registry_config(buf.str());
}

void save_registry_file(const std::string& path, std::span<const RobotProfile> robots) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidProfile("cannot write registry config: " + path);
  out << serialize_registry_config(robots);
}

}  // namespace gestos
