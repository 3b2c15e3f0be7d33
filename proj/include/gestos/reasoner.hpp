#pragma once

#include "gestos/memory.hpp"
#include "gestos/registry.hpp"
#include "gestos/types.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gestos {

struct ReasonerUnavailable : Error {
  using Error::Error;
};
struct UninterpretableGesture : Error {
  using Error::Error;
};
struct MalformedReasonerOutput : Error {
  using Error::Error;
};
struct NoFeasibleCommand : Error {
  using Error::Error;
};

// What the reasoner knows about one robot: profile highlights plus the live
// state snapshot taken for this gesture.
struct RobotSummary {
  std::string id;
  std::string description;
  std::vector<std::pair<std::string, std::string>> commands;  // (id, description)
  RobotStatus status = RobotStatus::kOffline;
  double load = 0.0;
};

struct ReasonerInput {
  std::string description;  // canonical gesture text
  std::vector<RobotSummary> robots;
  std::vector<MemoryRecord> exemplars;  // most similar first
};

struct Candidate {
  std::string robot_id;
  std::string command_id;
  double confidence = 0.0;  // [0, 1]

  bool operator==(const Candidate&) const = default;
};

struct IntentResult {
  std::string intent_label;
  std::string task_description;
  std::vector<Candidate> candidates;  // preference order, best first

  bool operator==(const IntentResult&) const = default;
};

struct Decomposition {
  std::vector<std::pair<std::string, std::string>> subcommands;  // (robot, command)
  std::string rationale;
};

// Deterministic prompt template: role + output-format instructions, an
// exemplar section (elided when there are no exemplars), a robot section
// listing every command exactly once, and the gesture text.
std::string build_prompt(const ReasonerInput& input);

// First balanced top-level {...} span in free text (string-literal aware);
// nullopt when none exists. How JSON is lifted out of chatty replies.
std::optional<std::string> extract_json_object(const std::string& text);

// Extracts the first balanced top-level JSON object from the reply text and
// reads the IntentResult wire shape
//   {"intent":…,"task":…,"candidates":[{"robot":…,"command":…,"confidence":…}]}
// Missing intent/task default to ""; candidates must be non-empty with string
// robot/command and numeric confidence (clamped into [0, 1]). Throws
// MalformedReasonerOutput otherwise.
IntentResult parse_reasoner_output(const std::string& text);

// Canonical wire-shape serialization; parse_reasoner_output is its inverse.
std::string serialize_intent(const IntentResult& result);

// Converts reasoner candidates into ranked candidates carrying their position
// in the reasoner's preference order (feeds the selection context term).
std::vector<RankedCandidate> ranked_candidates(const IntentResult& result);

class Reasoner {
 public:
  virtual ~Reasoner() = default;

  // Maps a gesture description to an intent with ranked candidates. Throws
  // UninterpretableGesture or ReasonerUnavailable.
  virtual IntentResult interpret(const ReasonerInput& input) = 0;

  // Fallback pass: decompose a task into schema-valid subcommands using only
  // the given robots. Throws NoFeasibleCommand when nothing validates.
  virtual Decomposition explain_decompose(const std::string& task_description,
                                          std::span<const RobotSummary> robots) = 0;

  virtual std::string name() const = 0;
};

// Deterministic reasoner over the canonical description grammar. The rule
// table (docs/description-grammar.md) maps one canonical gesture to each of
// the eleven fleet commands; identical text always yields identical results.
class RuleReasoner : public Reasoner {
 public:
  IntentResult interpret(const ReasonerInput& input) override;
  Decomposition explain_decompose(const std::string& task_description,
                                  std::span<const RobotSummary> robots) override;
  std::string name() const override { return "rule"; }
};

struct LlmConfig {
  std::string url = "http://127.0.0.1:8089/v1/chat/completions";
  std::string model = "fleet-reasoner";
  double temperature = 0.0;
  double timeout_s = 30.0;
  int max_retries = 2;  // extra attempts after a malformed reply
  std::string api_key_env = "GESTOS_LLM_API_KEY";
};

// Chat-completions client implementation. Sends build_prompt() output,
// parses the strict-JSON reply, and retries malformed replies with a format
// reminder appended. Endpoint failures raise ReasonerUnavailable; exhausted
// retries raise UninterpretableGesture.
class LlmReasoner : public Reasoner {
 public:
  explicit LlmReasoner(LlmConfig config = {});

  IntentResult interpret(const ReasonerInput& input) override;
  Decomposition explain_decompose(const std::string& task_description,
                                  std::span<const RobotSummary> robots) override;
  std::string name() const override { return "llm"; }

  const LlmConfig& config() const { return config_; }

 private:
  std::string complete(const std::string& prompt);

  LlmConfig config_;
};

// Live-state summaries for every registered robot, sorted by robot id.
std::vector<RobotSummary> summarize_robots(const RobotRegistry& registry);

}  // namespace gestos
