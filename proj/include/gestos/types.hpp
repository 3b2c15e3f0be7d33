#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gestos {

// Standard 21-point hand topology: index 0 is the wrist, then each finger
// contributes four joints from the base of the palm out to the tip.
enum Landmark : int {
  kWrist = 0,
  kThumbCmc = 1,
  kThumbMcp = 2,
  kThumbIp = 3,
  kThumbTip = 4,
  kIndexMcp = 5,
  kIndexPip = 6,
  kIndexDip = 7,
  kIndexTip = 8,
  kMiddleMcp = 9,
  kMiddlePip = 10,
  kMiddleDip = 11,
  kMiddleTip = 12,
  kRingMcp = 13,
  kRingPip = 14,
  kRingDip = 15,
  kRingTip = 16,
  kPinkyMcp = 17,
  kPinkyPip = 18,
  kPinkyDip = 19,
  kPinkyTip = 20,
};

inline constexpr int kLandmarkCount = 21;

enum class Finger { kThumb = 0, kIndex = 1, kMiddle = 2, kRing = 3, kPinky = 4 };

inline constexpr std::array<Finger, 5> kAllFingers = {
    Finger::kThumb, Finger::kIndex, Finger::kMiddle, Finger::kRing,
    Finger::kPinky};

std::string to_string(Finger f);

enum class Handedness { kLeft, kRight };

std::string to_string(Handedness h);

// One observation of a single hand. Coordinates are normalized image units:
// x grows rightward, y grows downward, z is relative depth (more negative is
// closer to the camera). Confidence lies in [0, 1].
struct HandFrame {
  double t = 0.0;  // seconds
  Handedness hand = Handedness::kRight;
  double conf = 0.0;
  std::array<Eigen::Vector3d, kLandmarkCount> lm{};

  Eigen::Vector2d planar(int i) const { return lm[static_cast<size_t>(i)].head<2>(); }
};

bool operator==(const HandFrame& a, const HandFrame& b);

// Root of the engine's typed failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gestos
