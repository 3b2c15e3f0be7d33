#include "gestos/types.hpp"

namespace gestos {

std::string to_string(Finger f) {
  switch (f) {
    case Finger::kThumb:
      return "thumb";
    case Finger::kIndex:
      return "index";
    case Finger::kMiddle:
      return "middle";
    case Finger::kRing:
      return "ring";
    case Finger::kPinky:
      return "pinky";
  }
  return "unknown";
}

std::string to_string(Handedness h) {
  return h == Handedness::kLeft ? "left" : "right";
}

bool operator==(const HandFrame& a, const HandFrame& b) {
  if (a.t != b.t || a.hand != b.hand || a.conf != b.conf) return false;
  for (int i = 0; i < kLandmarkCount; ++i) {
    if (a.lm[static_cast<size_t>(i)] != b.lm[static_cast<size_t>(i)]) return false;
  }
  return true;
}

}  // namespace gestos
