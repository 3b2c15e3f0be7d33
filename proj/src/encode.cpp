#include "gestos/encode.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace gestos {
namespace {

constexpr double kDegeneratePalm = 1e-6;
constexpr double kDegenerateArea = 1e-9;

constexpr std::array<const char*, 8> kDirectionNames = {
    "right", "right-up", "up", "left-up", "left", "left-down", "down",
    "right-down"};

int finger_base(Finger f) {
  switch (f) {
    case Finger::kThumb:
      return kThumbMcp;
    case Finger::kIndex:
      return kIndexMcp;
    case Finger::kMiddle:
      return kMiddleMcp;
    case Finger::kRing:
      return kRingMcp;
    case Finger::kPinky:
      return kPinkyMcp;
  }
  return kWrist;
}

int finger_tip(Finger f) {
  switch (f) {
    case Finger::kThumb:
      return kThumbTip;
    case Finger::kIndex:
      return kIndexTip;
    case Finger::kMiddle:
      return kMiddleTip;
    case Finger::kRing:
      return kRingTip;
    case Finger::kPinky:
      return kPinkyTip;
  }
  return kWrist;
}

}  // namespace

std::string to_string(DirectionLabel d) {
  return kDirectionNames[static_cast<size_t>(d)];
}

std::optional<DirectionLabel> direction_from_string(const std::string& s) {
  for (size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (s == kDirectionNames[i]) return static_cast<DirectionLabel>(i);
  }
  return std::nullopt;
}

std::string to_string(PalmFacing f) {
  switch (f) {
    case PalmFacing::kToward:
      return "toward";
    case PalmFacing::kAway:
      return "away";
    case PalmFacing::kUnknown:
      return "unknown";
  }
  return "unknown";
}

std::string to_string(MotionMagnitude m) {
  switch (m) {
    case MotionMagnitude::kStationary:
      return "stationary";
    case MotionMagnitude::kSmall:
      return "small";
    case MotionMagnitude::kLarge:
      return "large";
  }
  return "stationary";
}

double heading_degrees(const Eigen::Vector2d& delta) {
  const double deg =
      std::atan2(-delta.y(), delta.x()) * 180.0 / std::numbers::pi;
  return deg < 0.0 ? deg + 360.0 : deg;
}

std::optional<DirectionLabel> direction_label(const Eigen::Vector2d& delta) {
  if (delta.x() == 0.0 && delta.y() == 0.0) return std::nullopt;
  const double deg = heading_degrees(delta);
  const int sector =
      ((static_cast<int>(std::floor((deg + 22.5) / 45.0)) % 8) + 8) % 8;
  return static_cast<DirectionLabel>(sector);
}

std::array<bool, 5> finger_states(const HandFrame& frame) {
  std::array<bool, 5> extended{};
  const Eigen::Vector3d& wrist = frame.lm[kWrist];
  for (Finger f : {Finger::kIndex, Finger::kMiddle, Finger::kRing, Finger::kPinky}) {
    const int base = finger_base(f);
    const double tip_r = (frame.lm[static_cast<size_t>(finger_tip(f))] - wrist).norm();
    const double mid_r = (frame.lm[static_cast<size_t>(base + 1)] - wrist).norm();
    extended[static_cast<size_t>(f)] = tip_r > mid_r;
  }
  // The thumb folds across the palm rather than toward the wrist, so its
  // extension is measured against the opposite side of the palm.
  const Eigen::Vector3d& anchor = frame.lm[kPinkyMcp];
  const double tip_r = (frame.lm[kThumbTip] - anchor).norm();
  const double ip_r = (frame.lm[kThumbIp] - anchor).norm();
  extended[static_cast<size_t>(Finger::kThumb)] = tip_r > ip_r;
  return extended;
}

std::optional<DirectionLabel> point_direction(const HandFrame& frame, Finger f) {
  const Eigen::Vector2d base = frame.planar(finger_base(f));
  const Eigen::Vector2d tip = frame.planar(finger_tip(f));
  return direction_label(tip - base);
}

std::vector<std::vector<Finger>> finger_groups(const HandFrame& frame,
                                               double grouping_scale) {
  // Groups partition the extended fingers only; folded fingers are absent
  // (a fist has the empty partition).
  const std::array<bool, 5> extended = finger_states(frame);
  const double palm_width = (frame.lm[kIndexMcp] - frame.lm[kPinkyMcp]).norm();
  std::array<int, 5> component = {0, 1, 2, 3, 4};
  if (palm_width >= kDegeneratePalm) {  // degenerate palm: singletons
    const double radius = grouping_scale * palm_width;
    auto root = [&component](int i) {
      while (component[static_cast<size_t>(i)] != i) i = component[static_cast<size_t>(i)];
      return i;
    };
    for (int a = 0; a < 5; ++a) {
      if (!extended[static_cast<size_t>(a)]) continue;
      for (int b = a + 1; b < 5; ++b) {
        if (!extended[static_cast<size_t>(b)]) continue;
        const Eigen::Vector3d& ta =
            frame.lm[static_cast<size_t>(finger_tip(static_cast<Finger>(a)))];
        const Eigen::Vector3d& tb =
            frame.lm[static_cast<size_t>(finger_tip(static_cast<Finger>(b)))];
        if ((ta - tb).norm() <= radius) {
          const int ra = root(a);
          const int rb = root(b);
          if (ra != rb) component[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
        }
      }
    }
    for (int i = 0; i < 5; ++i) component[static_cast<size_t>(i)] = root(i);
  }

  std::vector<std::vector<Finger>> groups;
  for (int lead = 0; lead < 5; ++lead) {
    if (component[static_cast<size_t>(lead)] != lead ||
        !extended[static_cast<size_t>(lead)]) {
      continue;
    }
    std::vector<Finger> group;
    for (int i = 0; i < 5; ++i) {
      if (component[static_cast<size_t>(i)] == lead &&
          extended[static_cast<size_t>(i)]) {
        group.push_back(static_cast<Finger>(i));
      }
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

Orientation hand_orientation(const HandFrame& frame) {
  Orientation o;
  const Eigen::Vector2d wrist = frame.planar(kWrist);
  const Eigen::Vector2d u = frame.planar(kIndexMcp) - wrist;
  const Eigen::Vector2d v = frame.planar(kPinkyMcp) - wrist;
  const double cross_z = u.x() * v.y() - u.y() * v.x();
  if (std::abs(cross_z) < kDegenerateArea) {
    o.facing = PalmFacing::kUnknown;
  } else {
    const bool negative = cross_z < 0.0;
    const bool toward =
        frame.hand == Handedness::kRight ? negative : !negative;
    o.facing = toward ? PalmFacing::kToward : PalmFacing::kAway;
  }
  const auto axis = direction_label(frame.planar(kMiddleMcp) - wrist);
  if (axis.has_value()) {
    o.direction = *axis;
  } else {
    o.direction = DirectionLabel::kUp;
    o.facing = PalmFacing::kUnknown;
  }
  return o;
}

MotionDescriptor trajectory(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                            const EncoderParams& params) {
  MotionDescriptor m;
  const Eigen::Vector2d delta = to - from;
  const double d = delta.norm();
  if (d < params.stationary_below) {
    m.magnitude = MotionMagnitude::kStationary;
    return m;
  }
  m.magnitude =
      d >= params.large_from ? MotionMagnitude::kLarge : MotionMagnitude::kSmall;
  m.direction = direction_label(delta);
  return m;
}

}  // namespace gestos
