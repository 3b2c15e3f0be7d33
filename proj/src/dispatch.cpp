#include "gestos/dispatch.hpp"

#include "httplib.h"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace gestos {
namespace {

using nlohmann::json;

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

std::string format_dispatch_id(std::uint64_t n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "d%06llu", static_cast<unsigned long long>(n));
  return buf;
}

class LatencyTimer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

std::string to_string(DispatchStatus s) {
  switch (s) {
    case DispatchStatus::kExecuted:
      return "executed";
    case DispatchStatus::kRobotRejected:
      return "robot_rejected";
    case DispatchStatus::kNoFeasibleRobot:
      return "no_feasible_robot";
    case DispatchStatus::kNoFeasibleCommand:
      return "no_feasible_command";
    case DispatchStatus::kUninterpretable:
      return "uninterpretable";
  }
  return "uninterpretable";
}

std::optional<DispatchStatus> dispatch_status_from_string(const std::string& s) {
  if (s == "executed") return DispatchStatus::kExecuted;
  if (s == "robot_rejected") return DispatchStatus::kRobotRejected;
  if (s == "no_feasible_robot") return DispatchStatus::kNoFeasibleRobot;
  if (s == "no_feasible_command") return DispatchStatus::kNoFeasibleCommand;
  if (s == "uninterpretable") return DispatchStatus::kUninterpretable;
  return std::nullopt;
}

std::string serialize_outcome(const DispatchOutcome& outcome) {
  nlohmann::ordered_json doc;
  doc["id"] = outcome.dispatch_id;
  doc["text"] = outcome.description_text;
  doc["intent"] = outcome.intent_label;
  doc["robot"] = outcome.robot_id;
  doc["command"] = outcome.command_id;
  doc["status"] = to_string(outcome.status);
  doc["latency_ms"] = outcome.latency_ms;
  doc["detail"] = outcome.detail;
  return doc.dump();
}

std::optional<DispatchOutcome> parse_outcome_line(const std::string& line) {
  const json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  DispatchOutcome outcome;
  auto read_string = [&doc](const char* key, std::string* out) {
    if (!doc.contains(key) || !doc[key].is_string()) return false;
    *out = doc[key].get<std::string>();
    return true;
  };
  std::string status;
  if (!read_string("id", &outcome.dispatch_id) ||
      !read_string("text", &outcome.description_text) ||
      !read_string("intent", &outcome.intent_label) ||
      !read_string("robot", &outcome.robot_id) ||
      !read_string("command", &outcome.command_id) ||
      !read_string("status", &status) || !read_string("detail", &outcome.detail) ||
      !doc.contains("latency_ms") || !doc["latency_ms"].is_number()) {
    return std::nullopt;
  }
  const auto parsed_status = dispatch_status_from_string(status);
  if (!parsed_status.has_value()) return std::nullopt;
  outcome.status = *parsed_status;
  outcome.latency_ms = doc["latency_ms"].get<double>();
  return outcome;
}

WireResult post_command(const std::string& endpoint, const std::string& dispatch_id,
                        const std::string& command_id, const std::string& params_json,
                        double timeout_s) {
  std::string origin;
  std::string base;
  if (!split_endpoint(endpoint, &origin, &base)) {
    return WireResult{false, "bad endpoint: " + endpoint};
  }

  json params = json::parse(params_json, nullptr, false);
  if (params.is_discarded() || !params.is_object()) params = json::object();
  nlohmann::ordered_json body;
  body["dispatch_id"] = dispatch_id;
  body["command_id"] = command_id;
  body["params"] = std::move(params);

  httplib::Client client(origin);
  client.set_connection_timeout(std::chrono::duration<double>(timeout_s));
  client.set_read_timeout(std::chrono::duration<double>(timeout_s));
  client.set_write_timeout(std::chrono::duration<double>(timeout_s));

  const auto res = client.Post(base + "/command", body.dump(), "application/json");
  if (!res) return WireResult{false, "endpoint unreachable or timed out"};

  const json reply = json::parse(res->body, nullptr, false);
  std::string detail;
  if (reply.is_object() && reply.contains("detail") && reply["detail"].is_string()) {
    detail = reply["detail"].get<std::string>();
  }
  if (res->status == 200 && reply.is_object() && reply.contains("status") &&
      reply["status"].is_string() && reply["status"].get<std::string>() == "accepted") {
    return WireResult{true, detail};
  }
  if (detail.empty()) detail = "HTTP " + std::to_string(res->status);
  return WireResult{false, detail};
}

std::vector<std::vector<Keyframe>> segment_gestures(std::span<const Keyframe> keyframes,
                                                    double idle_timeout_s) {
  std::vector<std::vector<Keyframe>> gestures;
  for (const Keyframe& kf : keyframes) {
    if (gestures.empty() ||
        kf.frame.t - gestures.back().back().frame.t >= idle_timeout_s) {
      gestures.emplace_back();
    }
    gestures.back().push_back(kf);
  }
  return gestures;
}

Dispatcher::Dispatcher(RobotRegistry& registry, Reasoner& reasoner,
                       VectorMemory& memory, DispatcherConfig config)
    : registry_(registry),
      reasoner_(reasoner),
      memory_(memory),
      config_(config),
      extractor_(config.extractor) {}

std::optional<DispatchOutcome> Dispatcher::feed_frame(const HandFrame& frame) {
  std::optional<DispatchOutcome> outcome;
  // Idle-gap check runs on every validated frame, so a hand that disappears
  // (confidence-gated frames) still closes the open gesture.
  if (!pending_.empty() &&
      frame.t - pending_.back().frame.t >= config_.gesture_timeout_s) {
    outcome = process_gesture(pending_);
    pending_.clear();
  }
  if (auto kf = extractor_.feed(frame); kf.has_value()) {
    pending_.push_back(std::move(*kf));
  }
  return outcome;
}

std::optional<DispatchOutcome> Dispatcher::finish() {
  if (pending_.empty()) return std::nullopt;
  DispatchOutcome outcome = process_gesture(pending_);
  pending_.clear();
  return outcome;
}

void Dispatcher::remember(const std::string& text, const std::string& robot_id,
                          const std::string& command_id, double gesture_time,
                          MemoryOutcome outcome, DispatchOutcome* report) {
  remembered_ = true;
  MemoryRecord record;
  record.description_text = text;
  record.robot_id = robot_id;
  record.command_id = command_id;
  record.timestamp = gesture_time;
  record.outcome = outcome;
  try {
    memory_.store(record);
  } catch (const StorageFailure& e) {
    if (!report->detail.empty()) report->detail += "; ";
    report->detail += e.what();
  }
}

DispatchOutcome Dispatcher::dispatch_selected(const GestureDescription& desc,
                                              const SelectionScore& score,
                                              DispatchOutcome outcome,
                                              double gesture_time) {
  outcome.robot_id = score.robot_id;
  outcome.command_id = score.command_id;
  const auto profile = registry_.find_robot(score.robot_id);
  if (!profile.has_value()) {
    outcome.status = DispatchStatus::kNoFeasibleRobot;
    outcome.detail = "selected robot disappeared from the registry";
    remember(desc.text, "", "", gesture_time, MemoryOutcome::kFailed, &outcome);
    return outcome;
  }
  const WireResult wire =
      post_command(profile->endpoint, outcome.dispatch_id, score.command_id, "{}",
                   config_.dispatch_timeout_s);
  if (wire.accepted) {
    outcome.status = DispatchStatus::kExecuted;
    remember(desc.text, score.robot_id, score.command_id, gesture_time,
             MemoryOutcome::kSuccess, &outcome);
  } else {
    outcome.status = DispatchStatus::kRobotRejected;
    outcome.detail = wire.detail;
    remember(desc.text, score.robot_id, score.command_id, gesture_time,
             MemoryOutcome::kRejected, &outcome);
  }
  return outcome;
}

DispatchOutcome Dispatcher::run_decomposition(const GestureDescription& desc,
                                              const IntentResult& intent,
                                              DispatchOutcome outcome,
                                              double gesture_time) {
  // Only robots that can currently act may host fallback steps.
  const std::vector<std::string> available = registry_.available_robots();
  std::vector<RobotSummary> summaries;
  for (const RobotSummary& s : summarize_robots(registry_)) {
    if (std::find(available.begin(), available.end(), s.id) != available.end()) {
      summaries.push_back(s);
    }
  }

  const Decomposition decomposition =
      reasoner_.explain_decompose(intent.task_description, summaries);

  size_t executed = 0;
  for (const auto& [robot_id, command_id] : decomposition.subcommands) {
    const auto profile = registry_.find_robot(robot_id);
    if (!profile.has_value()) continue;
    const WireResult wire = post_command(profile->endpoint, outcome.dispatch_id,
                                         command_id, "{}", config_.dispatch_timeout_s);
    if (!wire.accepted) {
      outcome.status = DispatchStatus::kRobotRejected;
      outcome.robot_id = robot_id;
      outcome.command_id = command_id;
      outcome.detail = "decomposition step " + std::to_string(executed + 1) +
                       " rejected: " + wire.detail;
      remember(desc.text, robot_id, command_id, gesture_time,
               MemoryOutcome::kRejected, &outcome);
      return outcome;  // abort the remainder on first rejection
    }
    ++executed;
    remember(desc.text, robot_id, command_id, gesture_time, MemoryOutcome::kSuccess,
             &outcome);
  }

  if (executed == 0) {
    outcome.status = DispatchStatus::kNoFeasibleCommand;
    outcome.detail = "decomposition had no dispatchable step";
    remember(desc.text, "", "", gesture_time, MemoryOutcome::kFailed, &outcome);
    return outcome;
  }
  outcome.status = DispatchStatus::kExecuted;
  outcome.robot_id = decomposition.subcommands.front().first;
  outcome.command_id = decomposition.subcommands.front().second;
  outcome.detail = "decomposition of " + std::to_string(executed) + " step(s): " +
                   decomposition.rationale;
  return outcome;
}

DispatchOutcome Dispatcher::process_gesture(std::span<const Keyframe> gesture) {
  const LatencyTimer timer;
  DispatchOutcome outcome;
  outcome.dispatch_id = format_dispatch_id(next_dispatch_++);
  ++gestures_;
  remembered_ = false;

  try {
    const GestureDescription desc = encode_gesture(gesture, config_.encoder);
    outcome.description_text = desc.text;
    const double gesture_time = gesture.back().frame.t;

    if (config_.poll_states) registry_.poll_states(config_.state_poll_timeout_s);

    // Nothing in the fleet can act: report that rather than blaming the
    // gesture. The explainer cannot help when no robot is available.
    if (!registry_.any_available()) {
      outcome.status = DispatchStatus::kNoFeasibleRobot;
      outcome.detail = registry_.size() == 0 ? "no robot registered"
                                             : "no robot operational with spare load";
      remember(desc.text, "", "", gesture_time, MemoryOutcome::kFailed, &outcome);
      outcome.latency_ms = timer.elapsed_ms();
      return outcome;
    }

    ReasonerInput input;
    input.description = desc.text;
    input.robots = summarize_robots(registry_);
    input.exemplars =
        memory_.retrieve(desc.text, static_cast<size_t>(std::max(config_.memory_k, 0)));

    const IntentResult intent = reasoner_.interpret(input);
    outcome.intent_label = intent.intent_label;

    const std::vector<RankedCandidate> ranked = ranked_candidates(intent);
    const std::vector<RankedCandidate> feasible = registry_.feasible_robots(ranked);

    if (feasible.empty()) {
      // Pass a copy: if the explainer throws, the outcome must keep its
      // dispatch id, description text, and intent label for the catch blocks
      // and the audit record below.
      outcome = run_decomposition(desc, intent, outcome, gesture_time);
    } else {
      const SelectionScore score = registry_.select_robot(feasible, config_.weights);
      outcome = dispatch_selected(desc, score, outcome, gesture_time);
    }
  } catch (const UninterpretableGesture& e) {
    outcome.status = DispatchStatus::kUninterpretable;
    outcome.detail = e.what();
  } catch (const ReasonerUnavailable& e) {
    outcome.status = DispatchStatus::kUninterpretable;
    outcome.detail = std::string("reasoner unavailable: ") + e.what();
  } catch (const NoFeasibleCommand& e) {
    outcome.status = DispatchStatus::kNoFeasibleCommand;
    outcome.detail = e.what();
  } catch (const NoFeasibleRobot& e) {
    outcome.status = DispatchStatus::kNoFeasibleRobot;
    outcome.detail = e.what();
  } catch (const std::exception& e) {
    outcome.status = DispatchStatus::kUninterpretable;
    outcome.detail = std::string("pipeline error: ") + e.what();
  }

  // Paths that threw bypassed the store; keep the audit trail complete.
  if (!remembered_ && !outcome.description_text.empty() && !gesture.empty()) {
    remember(outcome.description_text, "", "", gesture.back().frame.t,
             MemoryOutcome::kFailed, &outcome);
  }

  outcome.latency_ms = timer.elapsed_ms();
  return outcome;
}

}  // namespace gestos
