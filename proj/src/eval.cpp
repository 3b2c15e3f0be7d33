#include "gestos/eval.hpp"

#include "gestos/frame_stream.hpp"
#include "gestos/sim_robot.hpp"
#include "gestos/synthetic.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace gestos {

using nlohmann::ordered_json;

std::string serialize_corpus_entry(const CorpusEntry& entry) {
  ordered_json doc;
  doc["gesture_id"] = entry.gesture_id;
  doc["expected_command"] = entry.expected_command;
  doc["expected_robot"] = entry.expected_robot;
  ordered_json frames = ordered_json::array();
  for (const HandFrame& frame : entry.frames) {
    frames.push_back(ordered_json::parse(serialize_frame(frame)));
  }
  doc["frames"] = std::move(frames);
  return doc.dump();
}

CorpusEntry parse_corpus_entry(const std::string& line) {
  ordered_json doc = ordered_json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw CorpusError("corpus line is not a JSON object");
  }
  CorpusEntry entry;
  for (const char* key : {"gesture_id", "expected_command", "expected_robot"}) {
    if (!doc.contains(key) || !doc[key].is_string()) {
      throw CorpusError(std::string("corpus entry missing string field: ") + key);
    }
  }
  entry.gesture_id = doc["gesture_id"].get<std::string>();
  entry.expected_command = doc["expected_command"].get<std::string>();
  entry.expected_robot = doc["expected_robot"].get<std::string>();
  if (!doc.contains("frames") || !doc["frames"].is_array()) {
    throw CorpusError("corpus entry missing frames array");
  }
  for (const auto& item : doc["frames"]) {
    std::string why;
    auto frame = parse_frame(item.dump(), &why);
    if (!frame) {
      throw CorpusError("corpus entry holds a malformed frame: " + why);
    }
    entry.frames.push_back(std::move(*frame));
  }
  return entry;
}

void save_corpus(const std::string& path, std::span<const CorpusEntry> corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw CorpusError("cannot open corpus file for writing: " + path);
  }
  for (const CorpusEntry& entry : corpus) {
    out << serialize_corpus_entry(entry) << '\n';
  }
  out.flush();
  if (!out) {
    throw CorpusError("failed while writing corpus file: " + path);
  }
}

std::vector<CorpusEntry> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError("cannot open corpus file: " + path);
  }
  std::vector<CorpusEntry> corpus;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      corpus.push_back(parse_corpus_entry(line));
    } catch (const CorpusError& e) {
      throw CorpusError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

std::vector<CorpusEntry> generate_corpus(std::uint64_t seed, int trials,
                                         double sigma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-0.08, 0.08);
  std::vector<CorpusEntry> corpus;
  for (const std::string& command : canonical_commands()) {
    const GestureScript script = canonical_gesture(command);
    for (int i = 0; i < trials; ++i) {
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "_%03d", i);
      CorpusEntry entry;
      entry.gesture_id = command + suffix;
      entry.expected_command = command;
      entry.expected_robot = canonical_robot(command);
      const Eigen::Vector2d translation(shift(rng), shift(rng));
      entry.frames = render_script(script, &rng, sigma, translation);
      corpus.push_back(std::move(entry));
    }
  }
  return corpus;
}

namespace {

// Confusion label for one trial: the executed command on a clean single
// execution, otherwise the failure shape.
std::string confusion_label(const std::vector<DispatchOutcome>& outcomes) {
  if (outcomes.empty()) {
    return "no_outcome";
  }
  if (outcomes.size() > 1) {
    return "multiple_outcomes";
  }
  if (outcomes.front().status == DispatchStatus::kExecuted) {
    return outcomes.front().command_id;
  }
  return to_string(outcomes.front().status);
}

std::string accuracy_cell(int correct, int trials) {
  if (trials <= 0) {
    return "0 (0/0)";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * correct / trials);
  std::string pct(buf);
  while (!pct.empty() && pct.back() == '0') {
    pct.pop_back();
  }
  if (!pct.empty() && pct.back() == '.') {
    pct.pop_back();
  }
  return pct + " (" + std::to_string(correct) + "/" + std::to_string(trials) + ")";
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

std::string render_table(const AccuracyReport& report, bool include_confusion) {
  struct Line {
    std::string command;
    std::string robot;
    std::string accuracy;
  };
  std::vector<Line> lines;
  for (const CommandAccuracy& row : report.rows) {
    lines.push_back({row.command_id, upper(row.robot_id),
                     accuracy_cell(row.correct, row.trials)});
  }
  const Line overall{"Overall", "", accuracy_cell(report.correct, report.trials)};

  size_t w1 = std::string("Command").size();
  size_t w2 = std::string("Robot").size();
  size_t w3 = std::string("Accuracy (%)").size();
  for (const Line& l : lines) {
    w1 = std::max(w1, l.command.size());
    w2 = std::max(w2, l.robot.size());
    w3 = std::max(w3, l.accuracy.size());
  }
  w1 = std::max(w1, overall.command.size());
  w3 = std::max(w3, overall.accuracy.size());

  auto pad = [](const std::string& s, size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::ostringstream out;
  auto emit = [&](const Line& l) {
    out << pad(l.command, w1) << " | " << pad(l.robot, w2) << " | " << l.accuracy
        << '\n';
  };
  const std::string rule = std::string(w1 + 1, '-') + "+" +
                           std::string(w2 + 2, '-') + "+" +
                           std::string(w3 + 1, '-');
  emit({"Command", "Robot", "Accuracy (%)"});
  out << rule << '\n';
  if (!lines.empty()) {
    for (const Line& l : lines) {
      emit(l);
    }
    out << rule << '\n';
    emit(overall);
  }

  if (include_confusion && !report.confusion.empty()) {
    out << "\nConfusion (expected -> outcome):\n";
    // Expected commands follow the table's row order, then any leftovers
    // alphabetically; outcomes by descending count, then label.
    std::vector<std::string> expected_order;
    for (const CommandAccuracy& row : report.rows) {
      if (report.confusion.count(row.command_id) != 0U) {
        expected_order.push_back(row.command_id);
      }
    }
    for (const auto& [expected, _] : report.confusion) {
      if (std::find(expected_order.begin(), expected_order.end(), expected) ==
          expected_order.end()) {
        expected_order.push_back(expected);
      }
    }
    for (const std::string& expected : expected_order) {
      const auto& buckets = report.confusion.at(expected);
      std::vector<std::pair<std::string, int>> sorted(buckets.begin(),
                                                      buckets.end());
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      out << "  " << expected << ":";
      bool first = true;
      for (const auto& [label, count] : sorted) {
        out << (first ? " " : ", ") << label << " x" << count;
        first = false;
      }
      out << '\n';
    }
  }
  return out.str();
}

namespace {

TrialOutcome run_trial(const CorpusEntry& entry, RobotRegistry& registry,
                       Reasoner& reasoner, VectorMemory& memory,
                       const DispatcherConfig& config) {
  Dispatcher dispatcher(registry, reasoner, memory, config);
  TrialOutcome trial;
  trial.gesture_id = entry.gesture_id;
  trial.expected_command = entry.expected_command;
  trial.expected_robot = entry.expected_robot;
  for (const HandFrame& frame : entry.frames) {
    if (auto outcome = dispatcher.feed_frame(frame)) {
      trial.outcomes.push_back(std::move(*outcome));
    }
  }
  if (auto outcome = dispatcher.finish()) {
    trial.outcomes.push_back(std::move(*outcome));
  }
  return trial;
}

}  // namespace

ReplayResult replay(std::span<const CorpusEntry> corpus, RobotRegistry& registry,
                    Reasoner& reasoner, VectorMemory& memory,
                    const DispatcherConfig& config, int parallelism) {
  ReplayResult result;
  result.trials.resize(corpus.size());

  if (parallelism > 1 && corpus.size() > 1) {
    // Parallel-streams mode: entries are independent streams, each with its
    // own Dispatcher; registry and memory are internally thread-safe. Trials
    // land at their corpus index, so the report below stays order-stable, but
    // memory grows in completion order — replays that must be byte-for-byte
    // reproducible should use the serial mode.
    const int workers =
        std::min<int>(parallelism, static_cast<int>(corpus.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < corpus.size();
             i = next.fetch_add(1)) {
          result.trials[i] =
              run_trial(corpus[i], registry, reasoner, memory, config);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  } else {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      result.trials[i] = run_trial(corpus[i], registry, reasoner, memory, config);
    }
  }

  // Tally keyed by expected command; row order resolved afterwards.
  std::map<std::string, CommandAccuracy> tally;
  for (const TrialOutcome& trial : result.trials) {
    const bool correct =
        trial.outcomes.size() == 1 &&
        trial.outcomes.front().status == DispatchStatus::kExecuted &&
        trial.outcomes.front().robot_id == trial.expected_robot &&
        trial.outcomes.front().command_id == trial.expected_command;

    CommandAccuracy& row = tally[trial.expected_command];
    row.command_id = trial.expected_command;
    row.robot_id = trial.expected_robot;
    row.trials += 1;
    row.correct += correct ? 1 : 0;
    result.report.trials += 1;
    result.report.correct += correct ? 1 : 0;
    result.report.confusion[trial.expected_command]
                           [confusion_label(trial.outcomes)] += 1;
  }

  for (const std::string& command : canonical_commands()) {
    auto it = tally.find(command);
    if (it != tally.end()) {
      result.report.rows.push_back(it->second);
      tally.erase(it);
    }
  }
  for (const auto& [command, row] : tally) {  // std::map: already sorted
    result.report.rows.push_back(row);
  }
  return result;
}

RobotProfile ur3_profile(const std::string& endpoint) {
  RobotProfile p;
  p.id = "ur3";
  p.description = "Tabletop manipulator arm with a parallel-jaw gripper";
  p.capacity = 1;
  p.endpoint = endpoint;
  p.commands = {
      {"manipulator_high_five", "Give a high five to the user", {}},
      {"manipulator_select_left_item", "Select item positioned to the left", {}},
      {"manipulator_select_right_item", "Select item positioned to the right", {}},
      {"manipulator_turn_object_around", "Rotate object to show all sides", {}},
      {"manipulator_close_gripper", "Grasp object", {}},
      {"manipulator_open_gripper", "Release object", {}},
  };
  return p;
}

RobotProfile go1_profile(const std::string& endpoint) {
  RobotProfile p;
  p.id = "go1";
  p.description = "Quadruped robot dog with expressive whole-body motions";
  p.capacity = 1;
  p.endpoint = endpoint;
  p.commands = {
      {"robodog_give_paw", "Lift front leg to simulate a paw shake", {}},
      {"robodog_stand_up", "Rise on command when user gestures upward", {}},
      {"robodog_stand_down", "Sit or lie down", {}},
      {"robodog_come_closer", "Approach the user on beckoning gesture", {}},
      {"robodog_wagging_tail", "Simulate tail-wagging behavior", {}},
  };
  return p;
}

std::vector<RobotProfile> default_fleet(const std::string& ur3_endpoint,
                                        const std::string& go1_endpoint) {
  return {ur3_profile(ur3_endpoint), go1_profile(go1_endpoint)};
}

ReplayResult run_synthetic_eval(std::uint64_t seed, int trials, double sigma,
                                Reasoner& reasoner) {
  SimulatedRobot ur3_sim;
  SimulatedRobot go1_sim;
  ur3_sim.start();
  go1_sim.start();

  RobotRegistry registry;
  for (RobotProfile& profile :
       default_fleet(ur3_sim.endpoint(), go1_sim.endpoint())) {
    registry.register_robot(std::move(profile));
  }

  VectorMemory memory;  // ephemeral, in-process only
  const auto corpus = generate_corpus(seed, trials, sigma);
  ReplayResult result = replay(corpus, registry, reasoner, memory, {});

  go1_sim.stop();
  ur3_sim.stop();
  return result;
}

}  // namespace gestos
