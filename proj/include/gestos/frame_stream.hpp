#pragma once

#include "gestos/types.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace gestos {

// Parses one newline-delimited frame record:
//   {"t": <seconds>, "hand": "left"|"right", "conf": <0..1>,
//    "lm": [[x, y, z] * 21]}
// x and y are clamped into [0, 1]; z passes through. Returns std::nullopt for
// malformed input (bad JSON, missing/mistyped fields, wrong landmark counts,
// confidence outside [0, 1], non-finite numbers). Unknown extra fields are
// ignored. If `why` is non-null it receives a short reason on failure.
std::optional<HandFrame> parse_frame(const std::string& line,
                                     std::string* why = nullptr);

// Canonical one-line serialization (field order t, hand, conf, lm; numbers in
// shortest round-trip form). parse_frame(serialize_frame(f)) reproduces f
// whenever f's coordinates are already in range.
std::string serialize_frame(const HandFrame& frame);

// Enforces non-decreasing timestamps on a stream of parsed frames. Frames
// older than the newest accepted one are dropped.
class SequenceValidator {
 public:
  bool accept(const HandFrame& frame);
  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t out_of_order() const { return out_of_order_; }
  void reset();

 private:
  bool has_last_ = false;
  double last_t_ = 0.0;
  std::uint64_t accepted_ = 0;
  std::uint64_t out_of_order_ = 0;
};

struct StreamStats {
  std::uint64_t lines = 0;       // non-empty lines seen
  std::uint64_t malformed = 0;   // dropped by parse_frame
  std::uint64_t out_of_order = 0;
  std::uint64_t accepted = 0;
};

// Reads newline-delimited records from `in`, parses and order-validates them,
// and invokes `on_frame` for each accepted frame. Blank lines are skipped;
// malformed or out-of-order records are counted and dropped, never fatal.
StreamStats consume_stream(std::istream& in,
                           const std::function<void(const HandFrame&)>& on_frame);

// Line-oriented TCP source. Binds on construction, serves one client at a
// time, and feeds every received line (stripped of trailing \r) to the
// callback given to serve(). serve() blocks until request_stop() is called
// from another thread; client disconnects simply cycle back to accept.
class TcpLineSource {
 public:
  // host may be an IPv4 literal or empty for 0.0.0.0; port 0 picks a free one.
  TcpLineSource(const std::string& host, int port);
  ~TcpLineSource();

  TcpLineSource(const TcpLineSource&) = delete;
  TcpLineSource& operator=(const TcpLineSource&) = delete;

  int port() const { return port_; }
  void serve(const std::function<void(const std::string&)>& on_line);
  void request_stop();

 private:
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stop_{false};
};

}  // namespace gestos
