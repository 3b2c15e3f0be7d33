#include "gestos/reasoner.hpp"

#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>

namespace gestos {
namespace {

using nlohmann::json;

constexpr const char* kSystemRole =
    "You translate structured hand-gesture descriptions into robot fleet "
    "commands. Always answer with strict JSON.";

constexpr const char* kFormatReminder =
    "\n\nReminder: your previous reply was not a valid JSON object of the "
    "required shape. Reply with exactly one JSON object and nothing else.";

bool split_url(const std::string& url, std::string* origin, std::string* path) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) return false;
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) {
    *origin = url;
    *path = "/";
  } else {
    *origin = url.substr(0, slash);
    *path = url.substr(slash);
  }
  return true;
}

std::string extract_reply_text(const std::string& body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw MalformedReasonerOutput("completion response is not JSON");
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw MalformedReasonerOutput("completion response has no choices");
  }
  const json& first = doc["choices"][0];
  if (first.contains("message") && first["message"].is_object() &&
      first["message"].contains("content") && first["message"]["content"].is_string()) {
    return first["message"]["content"].get<std::string>();
  }
  if (first.contains("text") && first["text"].is_string()) {
    return first["text"].get<std::string>();
  }
  throw MalformedReasonerOutput("completion choice carries no text");
}

}  // namespace

LlmReasoner::LlmReasoner(LlmConfig config) : config_(std::move(config)) {}

std::string LlmReasoner::complete(const std::string& prompt) {
  std::string origin;
  std::string path;
  if (!split_url(config_.url, &origin, &path)) {
    throw ReasonerUnavailable("bad completion endpoint URL: " + config_.url);
  }

  json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["messages"] = json::array({
      json{{"role", "system"}, {"content", kSystemRole}},
      json{{"role", "user"}, {"content", prompt}},
  });

  httplib::Client client(origin);
  client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
  client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str());
        key != nullptr && key[0] != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw ReasonerUnavailable("completion endpoint unreachable: " + config_.url);
  }
  if (res->status != 200) {
    throw ReasonerUnavailable("completion endpoint returned HTTP " +
                              std::to_string(res->status));
  }
  return extract_reply_text(res->body);
}

IntentResult LlmReasoner::interpret(const ReasonerInput& input) {
  std::string prompt = build_prompt(input);
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    try {
      return parse_reasoner_output(complete(prompt));
    } catch (const MalformedReasonerOutput&) {
      prompt += kFormatReminder;
    }
  }
  throw UninterpretableGesture("reasoner replies stayed malformed after " +
                               std::to_string(config_.max_retries) + " retries");
}

Decomposition LlmReasoner::explain_decompose(const std::string& task_description,
                                             std::span<const RobotSummary> robots) {
  std::ostringstream prompt;
  prompt << "A gesture was understood as this task, but no directly matching "
            "robot command is feasible right now.\nTask: "
         << task_description << "\n\nAvailable robots and commands:\n";
  for (const RobotSummary& robot : robots) {
    prompt << "- " << robot.id << ":";
    for (const auto& [id, description] : robot.commands) prompt << ' ' << id;
    prompt << '\n';
  }
  prompt << "\nDecompose the task into an ordered list of the commands above. "
            "Reply with exactly one JSON object of the shape "
            R"({"subcommands": [{"robot": "<robot_id>", "command": )"
            R"("<command_id>"}], "rationale": "<one sentence>"} )"
            "and nothing else.";

  json doc;
  bool have_object = false;
  std::string request = prompt.str();
  for (int attempt = 0; attempt <= config_.max_retries && !have_object; ++attempt) {
    const std::string text = complete(request);
    if (const auto object_text = extract_json_object(text); object_text.has_value()) {
      doc = json::parse(*object_text, nullptr, false);
      have_object = doc.is_object() && doc.contains("subcommands") &&
                    doc["subcommands"].is_array();
    }
    if (!have_object) request += kFormatReminder;
  }
  if (!have_object) {
    throw NoFeasibleCommand("explainer reply was not a decomposition");
  }

  Decomposition result;
  if (doc.contains("rationale") && doc["rationale"].is_string()) {
    result.rationale = doc["rationale"].get<std::string>();
  }
  for (const json& sc : doc["subcommands"]) {
    if (!sc.is_object() || !sc.contains("robot") || !sc["robot"].is_string() ||
        !sc.contains("command") || !sc["command"].is_string()) {
      continue;
    }
    const std::string robot_id = sc["robot"].get<std::string>();
    const std::string command_id = sc["command"].get<std::string>();
    for (const RobotSummary& robot : robots) {
      if (robot.id != robot_id) continue;
      for (const auto& [id, description] : robot.commands) {
        if (id == command_id) {
          result.subcommands.emplace_back(robot_id, command_id);
          break;
        }
      }
      break;
    }
  }
  if (result.subcommands.empty()) {
    throw NoFeasibleCommand("explainer produced no schema-valid subcommand");
  }
  return result;
}

}  // namespace gestos
