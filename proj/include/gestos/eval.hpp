#pragma once

#include "gestos/dispatch.hpp"
#include "gestos/memory.hpp"
#include "gestos/reasoner.hpp"
#include "gestos/registry.hpp"
#include "gestos/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gestos {

struct CorpusError : Error {
  using Error::Error;
};

// One labeled replay trial: a frame sequence plus the command and robot a
// correct run must dispatch.
struct CorpusEntry {
  std::string gesture_id;
  std::string expected_command;
  std::string expected_robot;
  std::vector<HandFrame> frames;
};

// Corpus JSONL: one entry per line,
//   {"gesture_id","expected_command","expected_robot","frames":[...]}
// with frames in the stream wire shape. Round-trips byte-for-byte.
std::string serialize_corpus_entry(const CorpusEntry& entry);
CorpusEntry parse_corpus_entry(const std::string& line);  // throws CorpusError
void save_corpus(const std::string& path, std::span<const CorpusEntry> corpus);
std::vector<CorpusEntry> load_corpus(const std::string& path);

// Seeded synthetic corpus: for every canonical command, `trials` renders of
// its canonical gesture with per-coordinate Gaussian jitter (sigma) and one
// uniform global translation in [-0.08, 0.08]^2 per trial. The same seed
// reproduces the same corpus byte-for-byte.
std::vector<CorpusEntry> generate_corpus(std::uint64_t seed, int trials,
                                         double sigma = 0.01);

// Per-command accuracy tally. A trial is correct only when it produced
// exactly one outcome, that outcome executed, and the executed (robot,
// command) pair matches the expectation.
struct CommandAccuracy {
  std::string command_id;
  std::string robot_id;  // expected fleet context
  int trials = 0;
  int correct = 0;
};

struct AccuracyReport {
  std::vector<CommandAccuracy> rows;
  // expected command -> (executed command id, or outcome status) -> count
  std::map<std::string, std::map<std::string, int>> confusion;
  int trials = 0;
  int correct = 0;
};

// Fixed-width text table: Command | Robot | Accuracy (%). Rows keep the
// canonical command order, then extra commands alphabetically; robot ids are
// uppercased, and the accuracy cell reads like "98 (98/100)". Ends with an
// Overall row and, when requested, a confusion section.
std::string render_table(const AccuracyReport& report,
                         bool include_confusion = false);

struct TrialOutcome {
  std::string gesture_id;
  std::string expected_command;
  std::string expected_robot;
  std::vector<DispatchOutcome> outcomes;
};

struct ReplayResult {
  AccuracyReport report;
  std::vector<TrialOutcome> trials;
};

// Replays every corpus entry through a fresh Dispatcher over the given
// registry/reasoner/memory. With parallelism == 1 (the accuracy-measurement
// mode) the run is deterministic given a deterministic reasoner and robot
// fleet: the same corpus renders the same report byte-for-byte. Higher
// parallelism replays entries as independent concurrent streams; trial and
// report order stay corpus-ordered, but memory write order does not.
ReplayResult replay(std::span<const CorpusEntry> corpus, RobotRegistry& registry,
                    Reasoner& reasoner, VectorMemory& memory,
                    const DispatcherConfig& config = {}, int parallelism = 1);

// The reference two-robot fleet the canonical gestures target.
RobotProfile ur3_profile(const std::string& endpoint);
RobotProfile go1_profile(const std::string& endpoint);
std::vector<RobotProfile> default_fleet(const std::string& ur3_endpoint,
                                        const std::string& go1_endpoint);

// End-to-end convenience for the CLI: generates a corpus, spins up one
// simulated robot per fleet profile, replays, and returns the result.
ReplayResult run_synthetic_eval(std::uint64_t seed, int trials, double sigma,
                                Reasoner& reasoner);

}  // namespace gestos
