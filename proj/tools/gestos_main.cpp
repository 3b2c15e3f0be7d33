// gestos: gesture-to-fleet orchestration engine CLI.

#include "gestos/config.hpp"
#include "gestos/description.hpp"
#include "gestos/dispatch.hpp"
#include "gestos/eval.hpp"
#include "gestos/frame_stream.hpp"
#include "gestos/keyframe.hpp"
#include "gestos/memory.hpp"
#include "gestos/reasoner.hpp"
#include "gestos/registry.hpp"
#include "gestos/sim_robot.hpp"
#include "gestos/synthetic.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

namespace {

using namespace gestos;

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted = true; }

std::unique_ptr<Reasoner> make_reasoner(const std::string& kind,
                                        const EngineConfig& config) {
  if (kind == "rule") {
    return std::make_unique<RuleReasoner>();
  }
  if (kind == "llm") {
    return std::make_unique<LlmReasoner>(config.llm);
  }
  throw CLI::ValidationError("--reasoner", "must be 'rule' or 'llm'");
}

void load_registry_into(RobotRegistry& registry, const std::string& path) {
  for (RobotProfile& profile : load_registry_file(path)) {
    registry.register_robot(std::move(profile));
  }
}

EngineConfig load_config(const std::string& path) {
  return path.empty() ? EngineConfig{} : load_engine_config(path);
}

// Emits one outcome line to stdout and the optional log sink.
void emit_outcome(const DispatchOutcome& outcome, std::ofstream* log) {
  const std::string line = serialize_outcome(outcome);
  std::cout << line << '\n' << std::flush;
  if (log != nullptr && log->is_open()) {
    *log << line << '\n' << std::flush;
  }
}

// Accepts "port", ":port", or "host:port"; host defaults to 127.0.0.1.
bool parse_socket_addr(const std::string& addr, std::string* host, int* port) {
  std::string host_part = "127.0.0.1";
  std::string port_part = addr;
  if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host_part = addr.substr(0, colon);
    port_part = addr.substr(colon + 1);
  }
  try {
    size_t used = 0;
    const int p = std::stoi(port_part, &used);
    if (used != port_part.size() || p < 0 || p > 65535) return false;
    *host = host_part;
    *port = p;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

int cmd_run(const std::string& registry_path, const std::string& reasoner_kind,
            const std::string& memory_path, const std::string& input,
            const std::string& socket_addr, const std::string& log_path,
            const std::string& config_path, double gesture_timeout) {
  const EngineConfig engine = load_config(config_path);
  RobotRegistry registry;
  load_registry_into(registry, registry_path);
  registry.set_freshness_window(engine.freshness_window_s);
  auto reasoner = make_reasoner(reasoner_kind, engine);
  VectorMemory memory = memory_path.empty()
                            ? VectorMemory(engine.memory_dim)
                            : VectorMemory::open(memory_path, engine.memory_dim);

  DispatcherConfig config = dispatcher_config(engine);
  if (gesture_timeout > 0.0) {
    config.gesture_timeout_s = gesture_timeout;
  }
  Dispatcher dispatcher(registry, *reasoner, memory, config);

  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::app);
    if (!log) {
      std::cerr << "gestos: cannot open log file: " << log_path << '\n';
      return 1;
    }
  }

  StreamStats stats;
  auto on_frame = [&](const HandFrame& frame) {
    if (auto outcome = dispatcher.feed_frame(frame)) {
      emit_outcome(*outcome, &log);
    }
  };

  if (!socket_addr.empty()) {
    std::string host;
    int tcp_port = 0;
    if (!parse_socket_addr(socket_addr, &host, &tcp_port)) {
      std::cerr << "gestos: bad --socket address: " << socket_addr << '\n';
      return 1;
    }
    TcpLineSource source(host, tcp_port);
    std::cerr << "gestos: listening on " << host << ':' << source.port() << '\n';
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::thread watchdog([&source] {
      while (!g_interrupted) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
      source.request_stop();
    });
    SequenceValidator validator;
    source.serve([&](const std::string& line) {
      if (line.empty()) return;
      ++stats.lines;
      std::string why;
      auto frame = parse_frame(line, &why);
      if (!frame) {
        ++stats.malformed;
        return;
      }
      if (!validator.accept(*frame)) {
        ++stats.out_of_order;
        return;
      }
      ++stats.accepted;
      on_frame(*frame);
    });
    g_interrupted = true;
    watchdog.join();
  } else if (input == "-") {
    stats = consume_stream(std::cin, on_frame);
  } else {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "gestos: cannot open input file: " << input << '\n';
      return 1;
    }
    stats = consume_stream(in, on_frame);
  }

  if (auto outcome = dispatcher.finish()) {
    emit_outcome(*outcome, &log);
  }
  std::cerr << "gestos: " << stats.lines << " lines, " << stats.accepted
            << " frames accepted, " << stats.malformed << " malformed, "
            << stats.out_of_order << " out of order, "
            << dispatcher.gestures_processed() << " gestures\n";
  return 0;
}

int cmd_describe(const std::string& input, const std::string& config_path,
                 bool dump_keyframes) {
  const EngineConfig engine = load_config(config_path);
  KeyframeExtractor extractor(engine.extractor);
  std::vector<Keyframe> pending;
  int gesture_no = 0;

  auto flush = [&]() {
    if (pending.empty()) return;
    ++gesture_no;
    if (!dump_keyframes) {
      std::cout << "# gesture " << gesture_no << " (" << pending.size()
                << " keyframes)\n";
      try {
        const GestureDescription desc = encode_gesture(pending, engine.encoder);
        std::cout << desc.text << "\n\n";
      } catch (const EmptyGesture&) {
        std::cout << "(empty)\n\n";
      }
    }
    pending.clear();
  };

  auto on_frame = [&](const HandFrame& frame) {
    if (!pending.empty() &&
        frame.t - pending.back().frame.t >= engine.gesture_timeout_s) {
      flush();
      // The extractor keeps its state across the idle gap on purpose: an
      // unchanged held hand does not start a new gesture.
    }
    if (auto kf = extractor.feed(frame)) {
      if (dump_keyframes) {
        std::cout << "{\"reason\":\"" << to_string(kf->reason)
                  << "\",\"frame\":" << serialize_frame(kf->frame) << "}\n";
      }
      pending.push_back(std::move(*kf));
    }
  };

  StreamStats stats;
  if (input == "-") {
    stats = consume_stream(std::cin, on_frame);
  } else {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "gestos: cannot open input file: " << input << '\n';
      return 1;
    }
    stats = consume_stream(in, on_frame);
  }
  flush();
  std::cerr << "gestos: " << stats.lines << " lines, " << stats.accepted
            << " frames accepted, " << stats.malformed << " malformed, "
            << stats.out_of_order << " out of order\n";
  return 0;
}

int cmd_eval(std::uint64_t seed, int trials, double sigma,
             const std::string& reasoner_kind, const std::string& config_path,
             bool confusion) {
  const EngineConfig engine = load_config(config_path);
  auto reasoner = make_reasoner(reasoner_kind, engine);
  const ReplayResult result = run_synthetic_eval(seed, trials, sigma, *reasoner);
  std::cout << render_table(result.report, confusion);
  return 0;
}

int cmd_replay(const std::string& corpus_path, const std::string& registry_path,
               const std::string& reasoner_kind, const std::string& memory_path,
               const std::string& config_path, bool confusion, int parallel) {
  const EngineConfig engine = load_config(config_path);
  RobotRegistry registry;
  load_registry_into(registry, registry_path);
  registry.set_freshness_window(engine.freshness_window_s);
  auto reasoner = make_reasoner(reasoner_kind, engine);
  VectorMemory memory = memory_path.empty()
                            ? VectorMemory(engine.memory_dim)
                            : VectorMemory::open(memory_path, engine.memory_dim);
  const auto corpus = load_corpus(corpus_path);
  const ReplayResult result = replay(corpus, registry, *reasoner, memory,
                                     dispatcher_config(engine), parallel);
  std::cout << render_table(result.report, confusion);
  return 0;
}

int cmd_corpus(std::uint64_t seed, int trials, double sigma,
               const std::string& out_path) {
  const auto corpus = generate_corpus(seed, trials, sigma);
  save_corpus(out_path, corpus);
  std::cerr << "gestos: wrote " << corpus.size() << " corpus entries to "
            << out_path << '\n';
  return 0;
}

int cmd_robots_list(const std::string& registry_path) {
  RobotRegistry registry;
  load_registry_into(registry, registry_path);
  for (const RobotProfile& robot : registry.robots()) {
    std::cout << robot.id << "  capacity=" << robot.capacity << "  "
              << robot.endpoint << '\n'
              << "  " << robot.description << '\n';
    for (const CommandSchema& command : robot.commands) {
      std::cout << "  - " << command.id << ": " << command.description << '\n';
    }
  }
  return 0;
}

int cmd_robots_state(const std::string& registry_path, bool no_poll) {
  RobotRegistry registry;
  load_registry_into(registry, registry_path);
  if (!no_poll) {
    const size_t ok = registry.poll_states();
    std::cerr << "gestos: polled " << ok << "/" << registry.size()
              << " robots\n";
  }
  for (const RobotProfile& robot : registry.robots()) {
    const LiveState state = registry.state(robot.id);
    std::cout << robot.id << "  status=" << to_string(state.status)
              << "  load=" << state.load;
    if (!state.detail.empty()) {
      std::cout << "  (" << state.detail << ')';
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_memory_export(const std::string& memory_path, const std::string& out) {
  VectorMemory memory = VectorMemory::open(memory_path);
  std::ofstream file;
  std::ostream* sink = &std::cout;
  if (!out.empty() && out != "-") {
    file.open(out, std::ios::trunc);
    if (!file) {
      std::cerr << "gestos: cannot open output file: " << out << '\n';
      return 1;
    }
    sink = &file;
  }
  for (const MemoryRecord& record : memory.records()) {
    *sink << serialize_memory_record(
                 record, embed_text(record.description_text, memory.dim()))
          << '\n';
  }
  std::cerr << "gestos: exported " << memory.size() << " records\n";
  return 0;
}

int cmd_memory_import(const std::string& memory_path, const std::string& from) {
  std::ifstream in(from);
  if (!in) {
    std::cerr << "gestos: cannot open input file: " << from << '\n';
    return 1;
  }
  VectorMemory memory = VectorMemory::open(memory_path);
  size_t imported = 0;
  size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (auto parsed = parse_memory_line(line)) {
      memory.store(parsed->first);
      ++imported;
    } else {
      ++skipped;
    }
  }
  std::cerr << "gestos: imported " << imported << " records into "
            << memory_path << " (" << skipped << " skipped)\n";
  return 0;
}

int cmd_memory_query(const std::string& memory_path, const std::string& query,
                     int k) {
  VectorMemory memory = VectorMemory::open(memory_path);
  std::cout << "records: " << memory.size()
            << " (successes: " << memory.success_count() << ")\n";
  if (!query.empty()) {
    const Eigen::VectorXd q = embed_text(query, memory.dim());
    for (const MemoryRecord& r :
         memory.retrieve(query, static_cast<size_t>(k))) {
      const double cos = cosine_similarity(q, embed_text(r.description_text,
                                                         memory.dim()));
      std::cout << "cos=" << cos << " t=" << r.timestamp << " -> " << r.robot_id
                << " " << r.command_id << '\n';
    }
  }
  return 0;
}

int cmd_sim(const std::vector<int>& ports, const std::string& status_name,
            double load, const std::vector<std::string>& reject,
            bool reject_all) {
  SimScenario scenario;
  const auto status = robot_status_from_string(status_name);
  if (!status) {
    std::cerr << "gestos: unknown robot status: " << status_name << '\n';
    return 1;
  }
  scenario.status = *status;
  scenario.load = load;
  scenario.reject_all = reject_all;
  scenario.reject_commands.insert(reject.begin(), reject.end());

  std::vector<std::unique_ptr<SimulatedRobot>> robots;
  for (int port : ports) {
    auto robot = std::make_unique<SimulatedRobot>(scenario);
    robot->start(port);
    std::cerr << "gestos: simulated robot at " << robot->endpoint() << '\n';
    robots.push_back(std::move(robot));
  }
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_interrupted) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  for (auto& robot : robots) {
    robot->stop();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gesture-to-fleet orchestration engine"};
  app.require_subcommand(1);

  // run
  std::string registry_path, reasoner_kind = "rule", memory_path, input = "-";
  std::string socket_addr, log_path, config_path;
  double gesture_timeout = 0.0;
  auto* run = app.add_subcommand(
      "run", "Stream frames and dispatch gestures to the fleet");
  run->add_option("--registry", registry_path, "registry config JSON")
      ->required();
  run->add_option("--reasoner", reasoner_kind, "rule | llm");
  run->add_option("--memory", memory_path, "memory JSONL file (persistent)");
  auto* input_opt =
      run->add_option("--input", input, "frame JSONL file, or - for stdin");
  run->add_option("--socket", socket_addr,
                  "listen for frames on a TCP address ([host:]port) instead")
      ->excludes(input_opt);
  run->add_option("--log", log_path, "append outcome JSONL to this file");
  run->add_option("--config", config_path, "engine config JSON");
  run->add_option("--gesture-timeout", gesture_timeout,
                  "idle seconds that close a gesture");

  // describe
  std::string d_input = "-", d_config;
  bool d_keyframes = false;
  auto* describe = app.add_subcommand(
      "describe", "Print canonical gesture descriptions for a frame stream");
  describe->add_option("--input", d_input, "frame JSONL file, or - for stdin");
  describe->add_option("--config", d_config, "engine config JSON");
  describe->add_flag("--keyframes", d_keyframes,
                     "dump selected keyframes as JSONL instead");

  // eval
  std::uint64_t e_seed = 20;
  int e_trials = 100;
  double e_sigma = 0.01;
  std::string e_reasoner = "rule", e_config;
  bool e_confusion = false;
  auto* eval = app.add_subcommand(
      "eval", "Synthetic accuracy evaluation against simulated robots");
  eval->add_option("--seed", e_seed, "corpus RNG seed");
  eval->add_option("--trials", e_trials, "trials per command");
  eval->add_option("--sigma", e_sigma, "landmark jitter sigma");
  eval->add_option("--reasoner", e_reasoner, "rule | llm");
  eval->add_option("--config", e_config, "engine config JSON");
  eval->add_flag("--confusion", e_confusion, "append the confusion section");

  // replay
  std::string r_corpus, r_registry, r_reasoner = "rule", r_memory, r_config;
  bool r_confusion = false;
  auto* replay_cmd = app.add_subcommand(
      "replay", "Replay a corpus file against the registry's endpoints");
  replay_cmd->add_option("--corpus", r_corpus, "corpus JSONL file")->required();
  replay_cmd->add_option("--registry", r_registry, "registry config JSON")
      ->required();
  replay_cmd->add_option("--reasoner", r_reasoner, "rule | llm");
  replay_cmd->add_option("--memory", r_memory, "memory JSONL file");
  replay_cmd->add_option("--config", r_config, "engine config JSON");
  replay_cmd->add_flag("--confusion", r_confusion,
                       "append the confusion section");
  int r_parallel = 1;
  replay_cmd
      ->add_option("--parallel", r_parallel,
                   "worker threads (parallel streams; >1 is not byte-stable)")
      ->check(CLI::PositiveNumber);

  // corpus
  std::uint64_t c_seed = 20;
  int c_trials = 100;
  double c_sigma = 0.01;
  std::string c_out;
  auto* corpus = app.add_subcommand("corpus", "Generate a synthetic corpus file");
  corpus->add_option("--seed", c_seed, "corpus RNG seed");
  corpus->add_option("--trials", c_trials, "trials per command");
  corpus->add_option("--sigma", c_sigma, "landmark jitter sigma");
  corpus->add_option("--out", c_out, "output corpus JSONL path")->required();

  // robots list|state
  std::string ro_registry;
  bool ro_no_poll = false;
  auto* robots = app.add_subcommand("robots", "Registry inspection");
  robots->require_subcommand(1);
  auto* robots_list =
      robots->add_subcommand("list", "Print robot profiles and schemas");
  robots_list->add_option("--registry", ro_registry, "registry config JSON")
      ->required();
  auto* robots_state =
      robots->add_subcommand("state", "Poll endpoints and print live states");
  robots_state->add_option("--registry", ro_registry, "registry config JSON")
      ->required();
  robots_state->add_flag("--no-poll", ro_no_poll,
                         "print cached states without polling");

  // memory export|import|query
  std::string m_file, m_out, m_from, m_query;
  int m_k = 3;
  auto* memory = app.add_subcommand("memory", "Memory file tools");
  memory->require_subcommand(1);
  auto* memory_export =
      memory->add_subcommand("export", "Write all records as JSONL");
  memory_export->add_option("--file", m_file, "memory JSONL file")->required();
  memory_export->add_option("--out", m_out, "output path, or - for stdout");
  auto* memory_import =
      memory->add_subcommand("import", "Append records from another JSONL file");
  memory_import->add_option("--file", m_file, "memory JSONL file")->required();
  memory_import->add_option("--from", m_from, "JSONL file to import")
      ->required();
  auto* memory_query =
      memory->add_subcommand("query", "Retrieve exemplars for a text");
  memory_query->add_option("--file", m_file, "memory JSONL file")->required();
  memory_query->add_option("--query", m_query, "query text");
  memory_query->add_option("--k", m_k, "exemplars to retrieve");

  // sim
  std::vector<int> s_ports;
  std::string s_status = "operational";
  double s_load = 0.0;
  std::vector<std::string> s_reject;
  bool s_reject_all = false;
  auto* sim = app.add_subcommand("sim", "Run simulated robots on fixed ports");
  sim->add_option("--port", s_ports, "port to serve on (repeatable)")
      ->required();
  sim->add_option("--status", s_status, "operational | busy | fault | offline");
  sim->add_option("--load", s_load, "reported load in [0, 1]");
  sim->add_option("--reject", s_reject, "command id to reject (repeatable)");
  sim->add_flag("--reject-all", s_reject_all, "reject every command");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(registry_path, reasoner_kind, memory_path, input,
                     socket_addr, log_path, config_path, gesture_timeout);
    }
    if (describe->parsed()) {
      return cmd_describe(d_input, d_config, d_keyframes);
    }
    if (eval->parsed()) {
      return cmd_eval(e_seed, e_trials, e_sigma, e_reasoner, e_config,
                      e_confusion);
    }
    if (replay_cmd->parsed()) {
      return cmd_replay(r_corpus, r_registry, r_reasoner, r_memory, r_config,
                        r_confusion, r_parallel);
    }
    if (corpus->parsed()) {
      return cmd_corpus(c_seed, c_trials, c_sigma, c_out);
    }
    if (robots_list->parsed()) {
      return cmd_robots_list(ro_registry);
    }
    if (robots_state->parsed()) {
      return cmd_robots_state(ro_registry, ro_no_poll);
    }
    if (memory_export->parsed()) {
      return cmd_memory_export(m_file, m_out);
    }
    if (memory_import->parsed()) {
      return cmd_memory_import(m_file, m_from);
    }
    if (memory_query->parsed()) {
      return cmd_memory_query(m_file, m_query, m_k);
    }
    if (sim->parsed()) {
      return cmd_sim(s_ports, s_status, s_load, s_reject, s_reject_all);
    }
  } catch (const std::exception& e) {
    std::cerr << "gestos: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
