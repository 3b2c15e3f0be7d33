#include "gestos/description.hpp"

#include <sstream>

namespace gestos {
namespace {

constexpr const char* kArrow = "→";  // the → in move[i→j]

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    const size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

void render_pose(std::ostringstream& out, size_t i, const PoseSummary& p) {
  out << "pose[" << i << "]: fingers=";
  bool any = false;
  for (Finger f : kAllFingers) {
    if (!p.extended[static_cast<size_t>(f)]) continue;
    if (any) out << ',';
    out << to_string(f);
    any = true;
  }
  if (!any) out << "none";

  out << "; pointing=";
  if (p.pointing.empty()) {
    out << "none";
  } else {
    for (size_t k = 0; k < p.pointing.size(); ++k) {
      if (k > 0) out << ',';
      out << to_string(p.pointing[k].first) << ':'
          << to_string(p.pointing[k].second);
    }
  }

  out << "; groups=";
  if (p.groups.empty()) {
    out << "none";  // no fingers extended, nothing to group
  }
  for (size_t g = 0; g < p.groups.size(); ++g) {
    if (g > 0) out << ',';
    out << '(';
    for (size_t k = 0; k < p.groups[g].size(); ++k) {
      if (k > 0) out << ',';
      out << to_string(p.groups[g][k]);
    }
    out << ')';
  }

  out << "; orientation=" << to_string(p.orientation.facing) << ' '
      << to_string(p.orientation.direction);
}

void render_move(std::ostringstream& out, size_t i, const MotionDescriptor& m) {
  out << "move[" << i << kArrow << i + 1 << "]: ";
  if (m.magnitude == MotionMagnitude::kStationary) {
    out << "stationary";
  } else {
    out << to_string(m.direction.value()) << ' ' << to_string(m.magnitude);
  }
}

bool parse_finger_csv(const std::string& s, std::array<bool, 5>* extended) {
  extended->fill(false);
  if (s == "none") return true;
  for (const std::string& name : split(s, ",")) {
    const auto f = finger_from_string(name);
    if (!f.has_value() || (*extended)[static_cast<size_t>(*f)]) return false;
    (*extended)[static_cast<size_t>(*f)] = true;
  }
  return true;
}

bool parse_pointing(const std::string& s, const std::array<bool, 5>& extended,
                    std::vector<std::pair<Finger, DirectionLabel>>* out) {
  out->clear();
  if (s == "none") {
    for (bool e : extended) {
      if (e) return false;
    }
    return true;
  }
  std::array<bool, 5> seen{};
  for (const std::string& item : split(s, ",")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) return false;
    const auto f = finger_from_string(item.substr(0, colon));
    const auto d = direction_from_string(item.substr(colon + 1));
    if (!f.has_value() || !d.has_value()) return false;
    const auto idx = static_cast<size_t>(*f);
    if (!extended[idx] || seen[idx]) return false;
    if (!out->empty() && out->back().first >= *f) return false;
    seen[idx] = true;
    out->emplace_back(*f, *d);
  }
  for (Finger f : kAllFingers) {
    if (extended[static_cast<size_t>(f)] && !seen[static_cast<size_t>(f)]) return false;
  }
  return true;
}

bool parse_groups(const std::string& s, const std::array<bool, 5>& extended,
                  std::vector<std::vector<Finger>>* out) {
  out->clear();
  std::array<bool, 5> seen{};
  if (s != "none") {
    size_t pos = 0;
    while (pos < s.size()) {
      if (s[pos] != '(') return false;
      const size_t close = s.find(')', pos);
      if (close == std::string::npos) return false;
      std::vector<Finger> group;
      for (const std::string& name : split(s.substr(pos + 1, close - pos - 1), ",")) {
        const auto f = finger_from_string(name);
        if (!f.has_value() || seen[static_cast<size_t>(*f)]) return false;
        if (!group.empty() && group.back() >= *f) return false;
        seen[static_cast<size_t>(*f)] = true;
        group.push_back(*f);
      }
      if (group.empty()) return false;
      if (!out->empty() && out->back().front() >= group.front()) return false;
      out->push_back(std::move(group));
      pos = close + 1;
      if (pos < s.size()) {
        if (s[pos] != ',') return false;
        ++pos;
      }
    }
  }
  // The partition must mention exactly the extended fingers.
  for (Finger f : kAllFingers) {
    if (seen[static_cast<size_t>(f)] != extended[static_cast<size_t>(f)]) return false;
  }
  return true;
}

bool parse_orientation(const std::string& s, Orientation* o) {
  const auto space = s.find(' ');
  if (space == std::string::npos) return false;
  const std::string facing = s.substr(0, space);
  if (facing == "toward") {
    o->facing = PalmFacing::kToward;
  } else if (facing == "away") {
    o->facing = PalmFacing::kAway;
  } else if (facing == "unknown") {
    o->facing = PalmFacing::kUnknown;
  } else {
    return false;
  }
  const auto d = direction_from_string(s.substr(space + 1));
  if (!d.has_value()) return false;
  o->direction = *d;
  return true;
}

bool parse_pose_line(const std::string& body, PoseSummary* pose) {
  const std::vector<std::string> fields = split(body, "; ");
  if (fields.size() != 4) return false;
  if (fields[0].rfind("fingers=", 0) != 0 || fields[1].rfind("pointing=", 0) != 0 ||
      fields[2].rfind("groups=", 0) != 0 || fields[3].rfind("orientation=", 0) != 0) {
    return false;
  }
  return parse_finger_csv(fields[0].substr(8), &pose->extended) &&
         parse_pointing(fields[1].substr(9), pose->extended, &pose->pointing) &&
         parse_groups(fields[2].substr(7), pose->extended, &pose->groups) &&
         parse_orientation(fields[3].substr(12), &pose->orientation);
}

bool parse_move_line(const std::string& body, MotionDescriptor* move) {
  if (body == "stationary") {
    move->direction.reset();
    move->magnitude = MotionMagnitude::kStationary;
    return true;
  }
  const auto space = body.find(' ');
  if (space == std::string::npos) return false;
  const auto d = direction_from_string(body.substr(0, space));
  if (!d.has_value()) return false;
  const std::string mag = body.substr(space + 1);
  if (mag == "small") {
    move->magnitude = MotionMagnitude::kSmall;
  } else if (mag == "large") {
    move->magnitude = MotionMagnitude::kLarge;
  } else {
    return false;
  }
  move->direction = *d;
  return true;
}

}  // namespace

std::optional<Finger> finger_from_string(const std::string& s) {
  for (Finger f : kAllFingers) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

std::string render_description(Handedness hand,
                               std::span<const PoseSummary> poses,
                               std::span<const MotionDescriptor> moves) {
  std::ostringstream out;
  out << "hand: " << to_string(hand);
  for (size_t i = 0; i < poses.size(); ++i) {
    out << '\n';
    render_pose(out, i, poses[i]);
    if (i < moves.size()) {
      out << '\n';
      render_move(out, i, moves[i]);
    }
  }
  return out.str();
}

GestureDescription encode_gesture(std::span<const Keyframe> keyframes,
                                  const EncoderParams& params) {
  if (keyframes.empty()) throw EmptyGesture("encode_gesture: no keyframes");

  GestureDescription desc;
  desc.hand = keyframes.front().frame.hand;
  desc.poses.reserve(keyframes.size());
  for (const Keyframe& kf : keyframes) {
    PoseSummary pose;
    pose.extended = kf.signature.extension;
    pose.groups = kf.signature.grouping;
    pose.orientation = kf.signature.orientation;
    for (Finger f : kAllFingers) {
      if (!pose.extended[static_cast<size_t>(f)]) continue;
      const auto dir = point_direction(kf.frame, f);
      pose.pointing.emplace_back(f, dir.value_or(pose.orientation.direction));
    }
    desc.poses.push_back(std::move(pose));
  }
  for (size_t i = 0; i + 1 < keyframes.size(); ++i) {
    desc.moves.push_back(
        trajectory(keyframes[i].center, keyframes[i + 1].center, params));
  }
  desc.text = render_description(desc.hand, desc.poses, desc.moves);
  return desc;
}

std::optional<GestureDescription> parse_description(const std::string& text) {
  const std::vector<std::string> lines = split(text, "\n");
  if (lines.empty()) return std::nullopt;

  GestureDescription desc;
  if (lines[0] == "hand: left") {
    desc.hand = Handedness::kLeft;
  } else if (lines[0] == "hand: right") {
    desc.hand = Handedness::kRight;
  } else {
    return std::nullopt;
  }

  size_t next_pose = 0;
  for (size_t li = 1; li < lines.size(); ++li) {
    const bool expect_pose = li % 2 == 1;  // pose and move lines alternate
    const std::string& line = lines[li];
    if (expect_pose) {
      const std::string prefix = "pose[" + std::to_string(next_pose) + "]: ";
      if (line.rfind(prefix, 0) != 0) return std::nullopt;
      PoseSummary pose;
      if (!parse_pose_line(line.substr(prefix.size()), &pose)) return std::nullopt;
      desc.poses.push_back(std::move(pose));
      ++next_pose;
    } else {
      const std::string prefix = "move[" + std::to_string(next_pose - 1) + kArrow +
                                 std::to_string(next_pose) + "]: ";
      if (line.rfind(prefix, 0) != 0) return std::nullopt;
      MotionDescriptor move;
      if (!parse_move_line(line.substr(prefix.size()), &move)) return std::nullopt;
      desc.moves.push_back(move);
    }
  }
  if (desc.poses.empty() || desc.moves.size() != desc.poses.size() - 1) {
    return std::nullopt;
  }
  desc.text = text;
  return desc;
}

}  // namespace gestos
