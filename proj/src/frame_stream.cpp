#include "gestos/frame_stream.hpp"

#include "json.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <stdexcept>

namespace gestos {
namespace {

using nlohmann::json;

bool finite_number(const json& v) {
  return v.is_number() && std::isfinite(v.get<double>());
}

bool fail(std::string* why, const char* reason) {
  if (why != nullptr) *why = reason;
  return false;
}

bool extract_frame(const json& doc, HandFrame* out, std::string* why) {
  if (!doc.is_object()) return fail(why, "record is not an object");
  auto t_it = doc.find("t");
  if (t_it == doc.end() || !finite_number(*t_it)) return fail(why, "bad t");
  auto hand_it = doc.find("hand");
  if (hand_it == doc.end() || !hand_it->is_string()) return fail(why, "bad hand");
  const std::string hand = hand_it->get<std::string>();
  if (hand != "left" && hand != "right") return fail(why, "bad hand");
  auto conf_it = doc.find("conf");
  if (conf_it == doc.end() || !finite_number(*conf_it)) return fail(why, "bad conf");
  const double conf = conf_it->get<double>();
  if (conf < 0.0 || conf > 1.0) return fail(why, "conf out of range");
  auto lm_it = doc.find("lm");
  if (lm_it == doc.end() || !lm_it->is_array() || lm_it->size() != kLandmarkCount) {
    return fail(why, "lm must be 21 points");
  }

  out->t = t_it->get<double>();
  out->hand = hand == "left" ? Handedness::kLeft : Handedness::kRight;
  out->conf = conf;
  for (size_t i = 0; i < kLandmarkCount; ++i) {
    const json& p = (*lm_it)[i];
    if (!p.is_array() || p.size() != 3) return fail(why, "landmark must be [x,y,z]");
    for (size_t a = 0; a < 3; ++a) {
      if (!finite_number(p[a])) return fail(why, "landmark coordinate not a finite number");
    }
    const double x = std::clamp(p[0].get<double>(), 0.0, 1.0);
    const double y = std::clamp(p[1].get<double>(), 0.0, 1.0);
    out->lm[i] = Eigen::Vector3d(x, y, p[2].get<double>());
  }
  return true;
}

}  // namespace

std::optional<HandFrame> parse_frame(const std::string& line, std::string* why) {
  json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded()) {
    if (why != nullptr) *why = "invalid JSON";
    return std::nullopt;
  }
  HandFrame frame;
  if (!extract_frame(doc, &frame, why)) return std::nullopt;
  return frame;
}

std::string serialize_frame(const HandFrame& frame) {
  nlohmann::ordered_json doc;
  doc["t"] = frame.t;
  doc["hand"] = to_string(frame.hand);
  doc["conf"] = frame.conf;
  nlohmann::ordered_json lm = nlohmann::ordered_json::array();
  for (const auto& p : frame.lm) {
    lm.push_back({p.x(), p.y(), p.z()});
  }
  doc["lm"] = std::move(lm);
  return doc.dump();
}

bool SequenceValidator::accept(const HandFrame& frame) {
  if (has_last_ && frame.t < last_t_) {
    ++out_of_order_;
    return false;
  }
  has_last_ = true;
  last_t_ = frame.t;
  ++accepted_;
  return true;
}

void SequenceValidator::reset() {
  has_last_ = false;
  last_t_ = 0.0;
  accepted_ = 0;
  out_of_order_ = 0;
}

StreamStats consume_stream(std::istream& in,
                           const std::function<void(const HandFrame&)>& on_frame) {
  StreamStats stats;
  SequenceValidator order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++stats.lines;
    auto frame = parse_frame(line);
    if (!frame.has_value()) {
      ++stats.malformed;
      continue;
    }
    if (!order.accept(*frame)) {
      ++stats.out_of_order;
      continue;
    }
    ++stats.accepted;
    on_frame(*frame);
  }
  return stats;
}

TcpLineSource::TcpLineSource(const std::string& host, int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (host.empty()) {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
  } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error("bad listen address: " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 1) != 0) {
    ::close(listen_fd_);
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpLineSource::~TcpLineSource() {
  request_stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpLineSource::request_stop() { stop_.store(true); }

void TcpLineSource::serve(const std::function<void(const std::string&)>& on_line) {
  auto wait_readable = [this](int fd) {
    while (!stop_.load()) {
      pollfd p{fd, POLLIN, 0};
      const int r = ::poll(&p, 1, 100);
      if (r > 0) return true;
      if (r < 0 && errno != EINTR) return false;
    }
    return false;
  };

  while (!stop_.load()) {
    if (!wait_readable(listen_fd_)) break;
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) continue;
    std::string pending;
    char buf[4096];
    while (!stop_.load() && wait_readable(client)) {
      const ssize_t n = ::recv(client, buf, sizeof(buf), 0);
      if (n <= 0) break;
      pending.append(buf, static_cast<size_t>(n));
      size_t pos = 0;
      size_t nl;
      while ((nl = pending.find('\n', pos)) != std::string::npos) {
        std::string line = pending.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) on_line(line);
        pos = nl + 1;
      }
      pending.erase(0, pos);
    }
    if (!pending.empty()) on_line(pending);
    ::close(client);
  }
}

}  // namespace gestos
