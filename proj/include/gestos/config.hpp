#pragma once

#include "gestos/dispatch.hpp"
#include "gestos/reasoner.hpp"
#include "gestos/types.hpp"

#include <string>

namespace gestos {

struct ConfigError : Error {
  using Error::Error;
};

// Whole-engine settings, loadable from a JSON file. Every field is optional
// in the file; omitted fields keep these defaults.
struct EngineConfig {
  ExtractorParams extractor;       // conf/motion thresholds, grouping scale
  EncoderParams encoder;           // grouping scale, motion magnitude cuts
  SelectionWeights weights;        // match/availability/context
  double freshness_window_s = 5.0;
  double gesture_timeout_s = 1.0;
  double dispatch_timeout_s = 5.0;
  double state_poll_timeout_s = 2.0;
  bool poll_states = true;
  int memory_dim = 256;
  int memory_k = 3;
  LlmConfig llm;
};

// JSON document shape (all keys optional, unknown keys rejected):
// {
//   "extractor": {"conf_threshold","motion_threshold"},
//   "encoder":   {"grouping_scale","stationary_below","large_from"},
//   "selection": {"match","availability","context","freshness_window_s"},
//   "dispatch":  {"gesture_timeout_s","dispatch_timeout_s",
//                 "state_poll_timeout_s","poll_states"},
//   "memory":    {"dim","k"},
//   "llm":       {"url","model","temperature","timeout_s","max_retries",
//                 "api_key_env"}
// }
EngineConfig parse_engine_config(const std::string& json_text);
EngineConfig load_engine_config(const std::string& path);

// The dispatcher slice of an engine config. The encoder's grouping scale is
// mirrored into the extractor so keyframe signatures and rendered text agree.
DispatcherConfig dispatcher_config(const EngineConfig& config);

}  // namespace gestos
