#pragma once

#include "gestos/description.hpp"
#include "gestos/keyframe.hpp"
#include "gestos/memory.hpp"
#include "gestos/reasoner.hpp"
#include "gestos/registry.hpp"
#include "gestos/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gestos {

enum class DispatchStatus {
  kExecuted,
  kRobotRejected,
  kNoFeasibleRobot,
  kNoFeasibleCommand,
  kUninterpretable,
};

std::string to_string(DispatchStatus s);
std::optional<DispatchStatus> dispatch_status_from_string(const std::string& s);

struct DispatchOutcome {
  std::string dispatch_id;
  std::string description_text;
  std::string intent_label;
  std::string robot_id;    // empty when no robot was chosen
  std::string command_id;  // empty when no command was chosen
  DispatchStatus status = DispatchStatus::kUninterpretable;
  double latency_ms = 0.0;
  std::string detail;
};

// One-line JSONL form: {"id","text","intent","robot","command","status",
// "latency_ms","detail"}.
std::string serialize_outcome(const DispatchOutcome& outcome);
std::optional<DispatchOutcome> parse_outcome_line(const std::string& line);

struct WireResult {
  bool accepted = false;
  std::string detail;
};

// POST {endpoint}/command with {"dispatch_id","command_id","params":{}}.
// Accepted only on HTTP 200 + {"status":"accepted"}; anything else (rejection
// body, other status codes, timeouts, unreachable host) comes back as not
// accepted with a reason.
WireResult post_command(const std::string& endpoint, const std::string& dispatch_id,
                        const std::string& command_id, const std::string& params_json,
                        double timeout_s);

// Batch form of idle segmentation: a keyframe arriving idle_timeout_s or more
// after the previous one starts a new gesture; the trailing group is closed by
// end of input. Keyframes are assumed time-ordered.
std::vector<std::vector<Keyframe>> segment_gestures(std::span<const Keyframe> keyframes,
                                                    double idle_timeout_s);

struct DispatcherConfig {
  ExtractorParams extractor;
  EncoderParams encoder;
  SelectionWeights weights;
  double gesture_timeout_s = 1.0;  // idle gap that closes a gesture
  int memory_k = 3;                // exemplars injected per gesture
  double dispatch_timeout_s = 5.0;
  double state_poll_timeout_s = 2.0;
  bool poll_states = true;  // poll GET /state once per gesture before selection
};

// End-to-end orchestrator for one input stream: keyframe extraction, idle
// segmentation, and the encode → memory → reason → select → dispatch chain.
// process_gesture never throws; every failure becomes an outcome status.
class Dispatcher {
 public:
  Dispatcher(RobotRegistry& registry, Reasoner& reasoner, VectorMemory& memory,
             DispatcherConfig config = {});

  // Feed one validated frame. Returns an outcome when this frame's timestamp
  // closed the previous gesture.
  std::optional<DispatchOutcome> feed_frame(const HandFrame& frame);

  // Flushes the pending gesture at end of stream.
  std::optional<DispatchOutcome> finish();

  // Runs the full pipeline over one keyframe batch.
  DispatchOutcome process_gesture(std::span<const Keyframe> gesture);

  const KeyframeExtractor& extractor() const { return extractor_; }
  std::uint64_t gestures_processed() const { return gestures_; }

 private:
  DispatchOutcome dispatch_selected(const GestureDescription& desc,
                                    const SelectionScore& score,
                                    DispatchOutcome outcome, double gesture_time);
  DispatchOutcome run_decomposition(const GestureDescription& desc,
                                    const IntentResult& intent,
                                    DispatchOutcome outcome, double gesture_time);
  void remember(const std::string& text, const std::string& robot_id,
                const std::string& command_id, double gesture_time,
                MemoryOutcome outcome, DispatchOutcome* report);

  RobotRegistry& registry_;
  Reasoner& reasoner_;
  VectorMemory& memory_;
  DispatcherConfig config_;
  KeyframeExtractor extractor_;
  std::vector<Keyframe> pending_;
  std::uint64_t next_dispatch_ = 1;
  std::uint64_t gestures_ = 0;
  bool remembered_ = false;  // audit record written for the current gesture
};

}  // namespace gestos
