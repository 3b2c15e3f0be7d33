#include "gestos/synthetic.hpp"

#include "gestos/keyframe.hpp"

#include <cmath>

namespace gestos {
namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::Vector2d dir(double deg) {
  const double rad = deg * kPi / 180.0;
  // Screen coordinates: y grows downward, so "up" is -y.
  return {std::cos(rad), -std::sin(rad)};
}

// Joint offsets along a straight finger, from the knuckle, at scale 1.
constexpr double kFingerPip = 0.07;
constexpr double kFingerDip = 0.13;
constexpr double kFingerTip = 0.20;
// Folded finger: joints curl back toward the wrist along the hand axis.
constexpr double kFoldPip = 0.06;
constexpr double kFoldDip = 0.01;
constexpr double kFoldTip = -0.04;
// Knuckle row: distance from wrist along the axis and lateral offsets
// (index side positive).
constexpr double kKnuckleReach = 0.20;
constexpr double kKnuckleOffset[4] = {0.075, 0.025, -0.025, -0.075};
// Extended tips converge toward the axis so the four fingers form one stable
// cluster under jitter (lateral offsets shrink by this factor at the tip).
constexpr double kTipCluster = 0.24;
// Fan angles per finger (index..pinky) in spread mode.
constexpr double kSpreadDeg[4] = {30.0, 10.0, -10.0, -30.0};

void check_margin(const HandFrame& frame, const PoseSpec& spec) {
  const auto states = finger_states(frame);
  const double margin = kExtensionMargin * spec.scale;
  const Eigen::Vector3d wrist = frame.lm[kWrist];
  const Eigen::Vector3d anchor = frame.lm[kPinkyMcp];
  for (Finger f : kAllFingers) {
    const int i = static_cast<int>(f);
    if (states[i] != spec.extended[i]) {
      throw Error("synthetic pose violates extension ground truth for " +
                  to_string(f));
    }
    double gap = 0.0;
    if (f == Finger::kThumb) {
      gap = (frame.lm[kThumbTip] - anchor).norm() -
            (frame.lm[kThumbIp] - anchor).norm();
    } else {
      const int base = 1 + 4 * i;  // knuckle landmark of this finger
      gap = (frame.lm[base + 3] - wrist).norm() -
            (frame.lm[base + 1] - wrist).norm();
    }
    const double signed_gap = spec.extended[i] ? gap : -gap;
    if (signed_gap < margin) {
      throw Error("synthetic pose margin too small for " + to_string(f));
    }
  }
}

}  // namespace

HandFrame build_pose(const PoseSpec& spec, double t, double conf) {
  const double s = spec.scale;
  const Eigen::Vector2d u = dir(spec.axis_deg);
  // Lateral unit vector pointing toward the index side. For a right hand
  // facing the camera with fingers up, the index finger sits to the image
  // right of the pinky; flipping either handedness or facing mirrors it.
  const bool index_clockwise =
      (spec.hand == Handedness::kRight) == (spec.facing == PalmFacing::kToward);
  const Eigen::Vector2d p =
      dir(spec.axis_deg + (index_clockwise ? -90.0 : 90.0));

  HandFrame frame;
  frame.t = t;
  frame.hand = spec.hand;
  frame.conf = conf;

  auto place = [&](int landmark, double along, double lateral, double depth) {
    const Eigen::Vector2d xy = spec.wrist + s * (along * u + lateral * p);
    frame.lm[landmark] = {xy.x(), xy.y(), s * depth};
  };

  place(kWrist, 0.0, 0.0, 0.0);

  // Thumb column, offset toward the index side of the palm.
  place(kThumbCmc, 0.06, 0.05, -0.010);
  place(kThumbMcp, 0.11, 0.09, -0.015);
  place(kThumbIp, 0.15, 0.12, -0.020);
  if (spec.extended[0]) {
    place(kThumbTip, 0.19, 0.20, -0.025);
  } else {
    place(kThumbTip, 0.14, 0.04, -0.025);
  }

  for (int f = 0; f < 4; ++f) {
    const int base = 5 + 4 * f;  // knuckle landmark (index=5, .., pinky=17)
    const double off = kKnuckleOffset[f];
    place(base, kKnuckleReach, off, -0.010);
    if (!spec.extended[f + 1]) {
      place(base + 1, kKnuckleReach + kFoldPip, off, -0.020);
      place(base + 2, kKnuckleReach + kFoldDip, off, -0.030);
      // Folded tips also converge so a fist reads as one stable cluster.
      place(base + 3, kKnuckleReach + kFoldTip, off * kTipCluster, -0.040);
      continue;
    }
    std::optional<double> straight;
    if (spec.spread) {
      // Fan outward: each finger bends toward its own lateral side, which is
      // clockwise from the axis exactly when the index side is.
      straight = spec.axis_deg + (index_clockwise ? -1.0 : 1.0) * kSpreadDeg[f];
    } else if (f == 0 && spec.index_dir_deg) {
      straight = *spec.index_dir_deg;
    }
    if (straight) {
      // Straight finger along an explicit heading (pointing poses / spread).
      const Eigen::Vector2d fd = dir(*straight);
      auto joint = [&](int lmk, double dist, double depth) {
        const Eigen::Vector2d xy = spec.wrist +
                                   s * (kKnuckleReach * u + off * p) +
                                   s * dist * fd;
        frame.lm[lmk] = {xy.x(), xy.y(), s * depth};
      };
      joint(base + 1, kFingerPip, -0.020);
      joint(base + 2, kFingerDip, -0.030);
      joint(base + 3, kFingerTip, -0.040);
    } else {
      // Clustered extension: joints interpolate toward a converged tip row.
      auto joint = [&](int lmk, double dist, double depth) {
        const double f_along = dist / kFingerTip;
        const double lateral = off * (1.0 + f_along * (kTipCluster - 1.0));
        place(lmk, kKnuckleReach + dist, lateral, depth);
      };
      joint(base + 1, kFingerPip, -0.020);
      joint(base + 2, kFingerDip, -0.030);
      joint(base + 3, kFingerTip, -0.040);
    }
  }

  check_margin(frame, spec);
  return frame;
}

std::vector<HandFrame> render_script(const GestureScript& script,
                                     std::mt19937_64* rng, double jitter_sigma,
                                     const Eigen::Vector2d& translation) {
  std::vector<HandFrame> frames;
  std::normal_distribution<double> noise(0.0, jitter_sigma);
  const double dt = 1.0 / script.fps;
  int index = 0;
  for (const ScriptStep& step : script.steps) {
    for (int i = 0; i < step.frames; ++i, ++index) {
      HandFrame frame = build_pose(step.pose, index * dt, script.conf);
      for (auto& lm : frame.lm) {
        if (rng != nullptr && jitter_sigma > 0.0) {
          lm += Eigen::Vector3d(noise(*rng), noise(*rng), noise(*rng));
        }
        lm.x() = std::clamp(lm.x() + translation.x(), 0.0, 1.0);
        lm.y() = std::clamp(lm.y() + translation.y(), 0.0, 1.0);
      }
      frames.push_back(std::move(frame));
    }
  }
  return frames;
}

namespace {

constexpr std::array<bool, 5> kOpenHand{true, true, true, true, true};
constexpr std::array<bool, 5> kFist{false, false, false, false, false};
constexpr std::array<bool, 5> kIndexOnly{false, true, false, false, false};
constexpr std::array<bool, 5> kThumbOnly{true, false, false, false, false};

PoseSpec pose(Eigen::Vector2d wrist, double axis, std::array<bool, 5> ext,
              PalmFacing facing, double scale,
              std::optional<double> index_dir = std::nullopt) {
  PoseSpec spec;
  spec.wrist = wrist;
  spec.axis_deg = axis;
  spec.extended = ext;
  spec.facing = facing;
  spec.scale = scale;
  spec.index_dir_deg = index_dir;
  return spec;
}

GestureScript script_of(std::vector<ScriptStep> steps) {
  GestureScript script;
  script.steps = std::move(steps);
  return script;
}

}  // namespace

const std::vector<std::string>& canonical_commands() {
  static const std::vector<std::string> kOrder = {
      "manipulator_select_left_item", "manipulator_select_right_item",
      "manipulator_high_five",        "manipulator_turn_object_around",
      "manipulator_close_gripper",    "manipulator_open_gripper",
      "robodog_give_paw",             "robodog_stand_up",
      "robodog_stand_down",           "robodog_come_closer",
      "robodog_wagging_tail",
  };
  return kOrder;
}

GestureScript canonical_gesture(const std::string& command_id) {
  const auto toward = PalmFacing::kToward;
  const auto away = PalmFacing::kAway;
  if (command_id == "manipulator_select_left_item") {
    return script_of({{pose({0.80, 0.50}, 180.0, kIndexOnly, toward, 0.9,
                            180.0),
                       10}});
  }
  if (command_id == "manipulator_select_right_item") {
    return script_of(
        {{pose({0.20, 0.50}, 0.0, kIndexOnly, toward, 0.9, 0.0), 10}});
  }
  if (command_id == "manipulator_high_five") {
    return script_of({{pose({0.5, 0.66}, 90.0, kOpenHand, toward, 0.9), 10}});
  }
  if (command_id == "manipulator_turn_object_around" ||
      command_id == "robodog_wagging_tail") {
    const PalmFacing facing =
        command_id == "manipulator_turn_object_around" ? toward : away;
    return script_of({
        {pose({0.5, 0.62}, 135.0, kIndexOnly, facing, 0.8, 180.0), 6},
        {pose({0.5, 0.62}, 45.0, kIndexOnly, facing, 0.8, 0.0), 6},
        {pose({0.5, 0.62}, 135.0, kIndexOnly, facing, 0.8, 180.0), 6},
    });
  }
  if (command_id == "manipulator_close_gripper") {
    return script_of({
        {pose({0.5, 0.66}, 90.0, kOpenHand, toward, 0.9), 6},
        {pose({0.5, 0.66}, 90.0, kFist, toward, 0.9), 6},
    });
  }
  if (command_id == "manipulator_open_gripper") {
    return script_of({
        {pose({0.5, 0.66}, 90.0, kFist, toward, 0.9), 6},
        {pose({0.5, 0.66}, 90.0, kOpenHand, toward, 0.9), 6},
    });
  }
  if (command_id == "robodog_give_paw") {
    return script_of({{pose({0.5, 0.66}, 90.0, kOpenHand, away, 0.9), 10}});
  }
  if (command_id == "robodog_stand_up") {
    return script_of({
        {pose({0.5, 0.74}, 90.0, kOpenHand, toward, 0.85), 6},
        {pose({0.5, 0.54}, 90.0, kOpenHand, toward, 0.85), 6},
    });
  }
  if (command_id == "robodog_stand_down") {
    return script_of({
        {pose({0.5, 0.54}, 90.0, kOpenHand, away, 0.85), 6},
        {pose({0.5, 0.74}, 90.0, kOpenHand, away, 0.85), 6},
    });
  }
  if (command_id == "robodog_come_closer") {
    return script_of({
        {pose({0.5, 0.66}, 90.0, kOpenHand, toward, 0.9), 6},
        {pose({0.5, 0.66}, 90.0, kThumbOnly, toward, 0.9), 6},
        {pose({0.5, 0.66}, 90.0, kOpenHand, toward, 0.9), 6},
    });
  }
  throw Error("unknown canonical command: " + command_id);
}

std::string canonical_robot(const std::string& command_id) {
  if (command_id.rfind("robodog_", 0) == 0) {
    return "go1";
  }
  if (command_id.rfind("manipulator_", 0) == 0) {
    return "ur3";
  }
  throw Error("unknown canonical command: " + command_id);
}

}  // namespace gestos
