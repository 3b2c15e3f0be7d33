#include "gestos/reasoner.hpp"

#include "json.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace gestos {
namespace {

using nlohmann::json;

std::string format_load(double load) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << load;
  return out.str();
}

}  // namespace

std::optional<std::string> extract_json_object(const std::string& text) {
  const size_t start = text.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

std::string build_prompt(const ReasonerInput& input) {
  std::ostringstream out;
  out << "You interpret structured hand-gesture descriptions for a heterogeneous "
         "robot fleet and pick the command that best matches the operator's "
         "intent.\n";
  out << "Reply with exactly one JSON object of the shape "
         R"({"intent": "<short phrase>", "task": "<one sentence>", )"
         R"("candidates": [{"robot": "<robot_id>", "command": "<command_id>", )"
         R"("confidence": <0..1>}]})"
         " and nothing else. Order candidates best-first.\n";

  if (!input.exemplars.empty()) {
    out << "\n## Prior successful interactions\n";
    size_t n = 0;
    for (const MemoryRecord& ex : input.exemplars) {
      out << "Example " << ++n << ":\n"
          << ex.description_text << "\n=> robot=" << ex.robot_id
          << " command=" << ex.command_id << "\n";
    }
  }

  out << "\n## Robots\n";
  for (const RobotSummary& robot : input.robots) {
    out << "- id: " << robot.id << "\n  description: " << robot.description
        << "\n  status: " << to_string(robot.status)
        << ", load: " << format_load(robot.load) << "\n  commands:\n";
    for (const auto& [id, description] : robot.commands) {
      out << "    - " << id << ": " << description << "\n";
    }
  }

  out << "\n## Gesture\n" << input.description << "\n";
  out << "\nRespond now with the JSON object only.";
  return out.str();
}

IntentResult parse_reasoner_output(const std::string& text) {
  const auto object_text = extract_json_object(text);
  if (!object_text.has_value()) {
    throw MalformedReasonerOutput("no JSON object in reasoner reply");
  }
  const json doc = json::parse(*object_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw MalformedReasonerOutput("reasoner reply is not valid JSON");
  }

  IntentResult result;
  if (doc.contains("intent") && doc["intent"].is_string()) {
    result.intent_label = doc["intent"].get<std::string>();
  }
  if (doc.contains("task") && doc["task"].is_string()) {
    result.task_description = doc["task"].get<std::string>();
  }
  if (!doc.contains("candidates") || !doc["candidates"].is_array() ||
      doc["candidates"].empty()) {
    throw MalformedReasonerOutput("reasoner reply has no candidates");
  }
  for (const json& c : doc["candidates"]) {
    if (!c.is_object() || !c.contains("robot") || !c["robot"].is_string() ||
        !c.contains("command") || !c["command"].is_string() ||
        !c.contains("confidence") || !c["confidence"].is_number()) {
      throw MalformedReasonerOutput("malformed candidate entry");
    }
    Candidate candidate;
    candidate.robot_id = c["robot"].get<std::string>();
    candidate.command_id = c["command"].get<std::string>();
    candidate.confidence = std::clamp(c["confidence"].get<double>(), 0.0, 1.0);
    result.candidates.push_back(std::move(candidate));
  }
  return result;
}

std::string serialize_intent(const IntentResult& result) {
  nlohmann::ordered_json doc;
  doc["intent"] = result.intent_label;
  doc["task"] = result.task_description;
  doc["candidates"] = nlohmann::ordered_json::array();
  for (const Candidate& c : result.candidates) {
    nlohmann::ordered_json cj;
    cj["robot"] = c.robot_id;
    cj["command"] = c.command_id;
    cj["confidence"] = c.confidence;
    doc["candidates"].push_back(std::move(cj));
  }
  return doc.dump();
}

std::vector<RankedCandidate> ranked_candidates(const IntentResult& result) {
  std::vector<RankedCandidate> out;
  out.reserve(result.candidates.size());
  const int total = static_cast<int>(result.candidates.size());
  for (int i = 0; i < total; ++i) {
    const Candidate& c = result.candidates[static_cast<size_t>(i)];
    out.push_back(RankedCandidate{c.robot_id, c.command_id, c.confidence, i, total});
  }
  return out;
}

std::vector<RobotSummary> summarize_robots(const RobotRegistry& registry) {
  std::vector<RobotProfile> profiles = registry.robots();
  std::sort(profiles.begin(), profiles.end(),
            [](const RobotProfile& a, const RobotProfile& b) { return a.id < b.id; });
  std::vector<RobotSummary> out;
  out.reserve(profiles.size());
  for (const RobotProfile& p : profiles) {
    RobotSummary s;
    s.id = p.id;
    s.description = p.description;
    for (const CommandSchema& c : p.commands) s.commands.emplace_back(c.id, c.description);
    const LiveState state = registry.state(p.id);
    s.status = state.status;
    s.load = state.load;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gestos
