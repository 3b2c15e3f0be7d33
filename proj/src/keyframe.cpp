#include "gestos/keyframe.hpp"

namespace gestos {

Eigen::Vector2d hand_center(const HandFrame& frame) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (int i : {kWrist, kIndexMcp, kMiddleMcp, kRingMcp, kPinkyMcp}) {
    sum += frame.planar(i);
  }
  return sum / 5.0;
}

StateSignature state_signature(const HandFrame& frame, double grouping_scale) {
  StateSignature sig;
  sig.extension = finger_states(frame);
  sig.orientation = hand_orientation(frame);
  sig.grouping = finger_groups(frame, grouping_scale);
  return sig;
}

std::string to_string(KeyframeReason r) {
  switch (r) {
    case KeyframeReason::kFirst:
      return "first";
    case KeyframeReason::kStateChange:
      return "state_change";
    case KeyframeReason::kMotion:
      return "motion";
  }
  return "first";
}

KeyframeExtractor::KeyframeExtractor(ExtractorParams params)
    : params_(params) {}

std::optional<Keyframe> KeyframeExtractor::feed(const HandFrame& frame) {
  ++frames_seen_;
  if (frame.conf < params_.conf_threshold) {
    ++dropped_;
    return std::nullopt;
  }

  StateSignature sig = state_signature(frame, params_.grouping_scale);
  const Eigen::Vector2d center = hand_center(frame);

  KeyframeReason reason;
  if (!has_keyframe_) {
    reason = KeyframeReason::kFirst;
  } else if (!(sig == last_signature_)) {
    reason = KeyframeReason::kStateChange;
  } else if ((center - last_center_).norm() > params_.motion_threshold) {
    reason = KeyframeReason::kMotion;
  } else {
    return std::nullopt;
  }

  has_keyframe_ = true;
  last_signature_ = sig;
  last_center_ = center;
  ++emitted_;
  return Keyframe{frame, std::move(sig), center, reason};
}

void KeyframeExtractor::reset() {
  has_keyframe_ = false;
  last_signature_ = StateSignature{};
  last_center_ = Eigen::Vector2d::Zero();
  frames_seen_ = 0;
  dropped_ = 0;
  emitted_ = 0;
}

std::vector<Keyframe> select_keyframes(std::span<const HandFrame> frames,
                                       const ExtractorParams& params) {
  KeyframeExtractor extractor(params);
  std::vector<Keyframe> out;
  for (const HandFrame& f : frames) {
    if (auto kf = extractor.feed(f); kf.has_value()) out.push_back(std::move(*kf));
  }
  return out;
}

}  // namespace gestos
