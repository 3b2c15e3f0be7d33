// Shared fixtures for the unit and acceptance suites.
#pragma once

#include "gestos/encode.hpp"
#include "gestos/synthetic.hpp"
#include "gestos/types.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace gestos::testing {

// A frame with every landmark at one point (degenerate by construction).
inline HandFrame uniform_frame(double t = 0.0, double conf = 0.95,
                               double x = 0.5, double y = 0.5, double z = 0.0,
                               Handedness hand = Handedness::kRight) {
  HandFrame f;
  f.t = t;
  f.hand = hand;
  f.conf = conf;
  for (auto& p : f.lm) p = Eigen::Vector3d(x, y, z);
  return f;
}

// x-reflection about the image midline plus a handedness flip: the transform
// a mirrored camera applies to a hand observation.
inline HandFrame mirror_frame(const HandFrame& f) {
  HandFrame m = f;
  m.hand = f.hand == Handedness::kRight ? Handedness::kLeft : Handedness::kRight;
  for (auto& p : m.lm) p.x() = 1.0 - p.x();
  return m;
}

// The label an x-reflection maps each compass label to: left/right components
// swap, up/down components survive.
inline DirectionLabel mirror_label(DirectionLabel d) {
  switch (d) {
    case DirectionLabel::kRight: return DirectionLabel::kLeft;
    case DirectionLabel::kRightUp: return DirectionLabel::kLeftUp;
    case DirectionLabel::kUp: return DirectionLabel::kUp;
    case DirectionLabel::kLeftUp: return DirectionLabel::kRightUp;
    case DirectionLabel::kLeft: return DirectionLabel::kRight;
    case DirectionLabel::kLeftDown: return DirectionLabel::kRightDown;
    case DirectionLabel::kDown: return DirectionLabel::kDown;
    case DirectionLabel::kRightDown: return DirectionLabel::kLeftDown;
  }
  return d;
}

// Translates every landmark by (dx, dy) without clamping; callers keep the
// result in range themselves.
inline HandFrame translate_frame(const HandFrame& f, double dx, double dy) {
  HandFrame t = f;
  for (auto& p : t.lm) {
    p.x() += dx;
    p.y() += dy;
  }
  return t;
}

// A unique temp-file path that removes the file on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& stem = "gestos-test") {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = (std::filesystem::temp_directory_path() /
             (stem + "-" + std::to_string(rng()) + ".tmp"))
                .string();
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

  void write(const std::string& content) const {
    std::ofstream out(path_, std::ios::trunc | std::ios::binary);
    out << content;
  }

  std::string read() const {
    std::ifstream in(path_, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

 private:
  std::string path_;
};

// A pose recipe drawn uniformly from the generator's whole input space.
inline PoseSpec random_pose_spec(std::mt19937_64& rng) {
  PoseSpec spec;
  std::uniform_real_distribution<double> axis(0.0, 360.0);
  std::uniform_real_distribution<double> scale(0.8, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  spec.wrist = Eigen::Vector2d(0.5, 0.6);
  spec.axis_deg = axis(rng);
  for (auto& e : spec.extended) e = coin(rng) == 1;
  spec.facing = coin(rng) == 1 ? PalmFacing::kToward : PalmFacing::kAway;
  spec.hand = coin(rng) == 1 ? Handedness::kRight : Handedness::kLeft;
  spec.scale = scale(rng);
  return spec;
}

}  // namespace gestos::testing
