#pragma once

#include "gestos/types.hpp"

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gestos {

struct DuplicateRobotId : Error {
  using Error::Error;
};
struct InvalidProfile : Error {
  using Error::Error;
};
struct UnknownRobot : Error {
  using Error::Error;
};
struct NoFeasibleRobot : Error {
  using Error::Error;
};

enum class ParamType { kString, kNumber, kBoolean, kEnum };

std::string to_string(ParamType t);
std::optional<ParamType> param_type_from_string(const std::string& s);

struct CommandParam {
  std::string name;
  ParamType type = ParamType::kString;
  bool required = false;
};

struct CommandSchema {
  std::string id;
  std::string description;
  std::vector<CommandParam> params;
};

struct RobotProfile {
  std::string id;
  std::string description;
  int capacity = 1;
  std::string endpoint;
  std::vector<CommandSchema> commands;
};

enum class RobotStatus { kOperational, kBusy, kFault, kOffline };

std::string to_string(RobotStatus s);
std::optional<RobotStatus> robot_status_from_string(const std::string& s);

struct LiveState {
  RobotStatus status = RobotStatus::kOffline;
  double load = 0.0;  // [0, 1]
  std::string detail;
  double last_updated = -1.0;  // monotonic seconds; < 0 means never
};

// A reasoner candidate with its position in the reasoner's own preference
// order, which feeds the context term of selection scoring.
struct RankedCandidate {
  std::string robot_id;
  std::string command_id;
  double confidence = 0.0;
  int rank = 0;        // 0-based position in the reasoner output
  int rank_total = 1;  // size of that output
};

struct SelectionWeights {
  double match = 0.6;
  double availability = 0.3;
  double context = 0.1;
};

struct SelectionScore {
  std::string robot_id;
  std::string command_id;
  double match_confidence = 0.0;
  double availability = 0.0;
  double context = 0.0;
  double total = 0.0;
};

// Monotonic wall time used for state freshness, in seconds since process
// start. Exposed so tests can reason about staleness windows.
double monotonic_seconds();

// Thread-safe store of robot profiles and live states. Many readers, single
// writer; reads never observe partial writes.
class RobotRegistry {
 public:
  // Throws DuplicateRobotId or InvalidProfile (empty id/endpoint, no
  // commands, capacity < 1, duplicate command ids or param names).
  void register_robot(RobotProfile profile);

  // Throws UnknownRobot. Stamps last_updated with monotonic_seconds(); load
  // is clamped into [0, 1].
  void update_state(const std::string& robot_id, LiveState state);

  // Effective state: demoted to offline when never updated or older than the
  // freshness window. Throws UnknownRobot.
  LiveState state(const std::string& robot_id) const;

  std::vector<RobotProfile> robots() const;  // registration order
  std::optional<RobotProfile> find_robot(const std::string& robot_id) const;
  bool has_robot(const std::string& robot_id) const;
  bool has_command(const std::string& robot_id, const std::string& command_id) const;
  size_t size() const;

  // True when at least one robot could act: effective status operational and
  // load < 1.
  bool any_available() const;
  std::vector<std::string> available_robots() const;  // sorted by id

  // Keeps candidates whose robot is registered, whose command is in that
  // robot's schema, and whose effective state is operational with load < 1.
  std::vector<RankedCandidate> feasible_robots(
      std::span<const RankedCandidate> candidates) const;

  // Weighted argmax over feasible candidates:
  //   total = w.match * confidence + w.availability * (1 - load)
  //         + w.context * (1 - rank / rank_total)
  // Ties break to the lexicographically smallest robot_id, then command_id.
  // Throws NoFeasibleRobot on an empty list.
  SelectionScore select_robot(std::span<const RankedCandidate> feasible,
                              const SelectionWeights& weights = {}) const;

  // Refreshes every robot's live state from GET {endpoint}/state. A robot
  // that cannot be reached or answers garbage is marked offline. Returns the
  // number of successful polls.
  size_t poll_states(double timeout_s = 2.0);

  void set_freshness_window(double seconds);
  double freshness_window() const;

 private:
  LiveState effective_state_locked(size_t idx, double now) const;

  mutable std::shared_mutex mu_;
  std::vector<RobotProfile> robots_;
  std::vector<LiveState> states_;
  std::unordered_map<std::string, size_t> index_;
  double freshness_window_ = 5.0;
};

// Registry config file I/O. The JSON document shape is
//   {"robots":[{"id","description","capacity","endpoint",
//               "commands":[{"id","description","params":[...]}]}]}
// and serialization is canonical: parse(serialize(x)) == x byte-for-byte.
std::vector<RobotProfile> parse_registry_config(const std::string& json_text);
std::string serialize_registry_config(std::span<const RobotProfile> robots);
std::vector<RobotProfile> load_registry_file(const std::string& path);
void save_registry_file(const std::string& path, std::span<const RobotProfile> robots);

}  // namespace gestos
