#pragma once

#include "gestos/encode.hpp"
#include "gestos/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gestos {

// Discrete summary of a hand pose. Two frames with equal signatures are the
// same pose for keyframing purposes. Individual finger pointing directions
// are deliberately not part of the signature: the orientation bucket already
// tracks the hand's axis, and keeping tips out avoids keyframe churn from
// fingertip tremor.
struct StateSignature {
  std::array<bool, 5> extension{};
  Orientation orientation;
  std::vector<std::vector<Finger>> grouping;  // extended fingers only

  bool operator==(const StateSignature&) const = default;
};

// Image-plane center of the hand: mean of the wrist and the four finger
// knuckles (landmarks 0, 5, 9, 13, 17).
Eigen::Vector2d hand_center(const HandFrame& frame);

StateSignature state_signature(const HandFrame& frame,
                               double grouping_scale = 0.5);

enum class KeyframeReason { kFirst, kStateChange, kMotion };

std::string to_string(KeyframeReason r);

struct Keyframe {
  HandFrame frame;
  StateSignature signature;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  KeyframeReason reason = KeyframeReason::kFirst;
};

struct ExtractorParams {
  double conf_threshold = 0.7;   // frames below this are dropped
  double motion_threshold = 0.05;  // center travel that forces a keyframe
  double grouping_scale = 0.5;
};

// Streaming keyframe selector. Feed validated frames in order; a keyframe is
// emitted for the first confident frame, whenever the pose signature changes,
// or when the hand center has drifted beyond motion_threshold since the last
// keyframe. Signature change wins over motion when both apply.
class KeyframeExtractor {
 public:
  explicit KeyframeExtractor(ExtractorParams params = {});

  // Returns the new keyframe if this frame became one.
  std::optional<Keyframe> feed(const HandFrame& frame);

  void reset();

  std::uint64_t frames_seen() const { return frames_seen_; }
  std::uint64_t dropped_low_confidence() const { return dropped_; }
  std::uint64_t keyframes_emitted() const { return emitted_; }

 private:
  ExtractorParams params_;
  bool has_keyframe_ = false;
  StateSignature last_signature_;
  Eigen::Vector2d last_center_ = Eigen::Vector2d::Zero();
  std::uint64_t frames_seen_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t emitted_ = 0;
};

// Batch convenience over a whole clip.
std::vector<Keyframe> select_keyframes(std::span<const HandFrame> frames,
                                       const ExtractorParams& params = {});

}  // namespace gestos
