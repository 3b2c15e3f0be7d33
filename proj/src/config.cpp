#include "gestos/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace gestos {
namespace {

using nlohmann::json;

// Pulls a numeric/bool/string/int field out of a section, enforcing type and
// flagging unknown keys afterwards via the consumed list.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (!doc.is_object()) {
      throw ConfigError("config section is not an object: " + name_);
    }
    doc_ = &doc;
  }

  void number(const char* key, double* out) {
    if (auto* v = take(key)) {
      if (!v->is_number()) throw err(key, "a number");
      *out = v->get<double>();
    }
  }
  void integer(const char* key, int* out) {
    if (auto* v = take(key)) {
      if (!v->is_number_integer()) throw err(key, "an integer");
      *out = v->get<int>();
    }
  }
  void boolean(const char* key, bool* out) {
    if (auto* v = take(key)) {
      if (!v->is_boolean()) throw err(key, "a boolean");
      *out = v->get<bool>();
    }
  }
  void string(const char* key, std::string* out) {
    if (auto* v = take(key)) {
      if (!v->is_string()) throw err(key, "a string");
      *out = v->get<std::string>();
    }
  }

  // Call last: rejects any key that was never consumed.
  void finish() const {
    for (const auto& [key, value] : doc_->items()) {
      if (consumed_.find(key) == consumed_.end()) {
        throw ConfigError("unknown config key: " + name_ + "." + key);
      }
    }
  }

 private:
  const json* take(const char* key) {
    consumed_.insert(key);
    auto it = doc_->find(key);
    return it == doc_->end() ? nullptr : &*it;
  }
  ConfigError err(const char* key, const char* want) const {
    return ConfigError("config key " + name_ + "." + key + " must be " + want);
  }

  const json* doc_ = nullptr;
  std::string name_;
  std::set<std::string> consumed_;
};

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ConfigError("invalid config value: " + what);
  }
}

}  // namespace

EngineConfig parse_engine_config(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config is not a JSON object");
  }

  EngineConfig cfg;
  std::set<std::string> seen;
  for (const auto& [key, value] : doc.items()) {
    if (key == "extractor") {
      Section s(value, key);
      s.number("conf_threshold", &cfg.extractor.conf_threshold);
      s.number("motion_threshold", &cfg.extractor.motion_threshold);
      s.finish();
    } else if (key == "encoder") {
      Section s(value, key);
      s.number("grouping_scale", &cfg.encoder.grouping_scale);
      s.number("stationary_below", &cfg.encoder.stationary_below);
      s.number("large_from", &cfg.encoder.large_from);
      s.finish();
    } else if (key == "selection") {
      Section s(value, key);
      s.number("match", &cfg.weights.match);
      s.number("availability", &cfg.weights.availability);
      s.number("context", &cfg.weights.context);
      s.number("freshness_window_s", &cfg.freshness_window_s);
      s.finish();
    } else if (key == "dispatch") {
      Section s(value, key);
      s.number("gesture_timeout_s", &cfg.gesture_timeout_s);
      s.number("dispatch_timeout_s", &cfg.dispatch_timeout_s);
      s.number("state_poll_timeout_s", &cfg.state_poll_timeout_s);
      s.boolean("poll_states", &cfg.poll_states);
      s.finish();
    } else if (key == "memory") {
      Section s(value, key);
      s.integer("dim", &cfg.memory_dim);
      s.integer("k", &cfg.memory_k);
      s.finish();
    } else if (key == "llm") {
      Section s(value, key);
      s.string("url", &cfg.llm.url);
      s.string("model", &cfg.llm.model);
      s.number("temperature", &cfg.llm.temperature);
      s.number("timeout_s", &cfg.llm.timeout_s);
      s.integer("max_retries", &cfg.llm.max_retries);
      s.string("api_key_env", &cfg.llm.api_key_env);
      s.finish();
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }

  require(cfg.extractor.conf_threshold >= 0.0 && cfg.extractor.conf_threshold <= 1.0,
          "extractor.conf_threshold must be in [0, 1]");
  require(cfg.extractor.motion_threshold >= 0.0,
          "extractor.motion_threshold must be >= 0");
  require(cfg.encoder.grouping_scale > 0.0, "encoder.grouping_scale must be > 0");
  require(cfg.encoder.stationary_below >= 0.0,
          "encoder.stationary_below must be >= 0");
  require(cfg.encoder.large_from >= cfg.encoder.stationary_below,
          "encoder.large_from must be >= encoder.stationary_below");
  require(cfg.weights.match >= 0.0 && cfg.weights.availability >= 0.0 &&
              cfg.weights.context >= 0.0,
          "selection weights must be >= 0");
  require(cfg.freshness_window_s > 0.0, "selection.freshness_window_s must be > 0");
  require(cfg.gesture_timeout_s > 0.0, "dispatch.gesture_timeout_s must be > 0");
  require(cfg.dispatch_timeout_s > 0.0, "dispatch.dispatch_timeout_s must be > 0");
  require(cfg.state_poll_timeout_s > 0.0,
          "dispatch.state_poll_timeout_s must be > 0");
  require(cfg.memory_dim >= 1, "memory.dim must be >= 1");
  require(cfg.memory_k >= 0, "memory.k must be >= 0");
  require(cfg.llm.timeout_s > 0.0, "llm.timeout_s must be > 0");
  require(cfg.llm.max_retries >= 0, "llm.max_retries must be >= 0");

  // Keyframe signatures and rendered descriptions must group fingers with
  // the same radius.
  cfg.extractor.grouping_scale = cfg.encoder.grouping_scale;
  return cfg;
}

EngineConfig load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_engine_config(buffer.str());
}

DispatcherConfig dispatcher_config(const EngineConfig& config) {
  DispatcherConfig out;
  out.extractor = config.extractor;
  out.encoder = config.encoder;
  out.weights = config.weights;
  out.gesture_timeout_s = config.gesture_timeout_s;
  out.memory_k = config.memory_k;
  out.dispatch_timeout_s = config.dispatch_timeout_s;
  out.state_poll_timeout_s = config.state_poll_timeout_s;
  out.poll_states = config.poll_states;
  return out;
}

}  // namespace gestos
