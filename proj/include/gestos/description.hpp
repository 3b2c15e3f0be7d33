#pragma once

#include "gestos/encode.hpp"
#include "gestos/keyframe.hpp"
#include "gestos/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gestos {

struct EmptyGesture : Error {
  using Error::Error;
};

// One pose line of a gesture description.
struct PoseSummary {
  std::array<bool, 5> extended{};
  // Extended fingers only, in finger order, with their pointing labels.
  std::vector<std::pair<Finger, DirectionLabel>> pointing;
  std::vector<std::vector<Finger>> groups;  // partition of extended fingers
  Orientation orientation;

  bool operator==(const PoseSummary&) const = default;
};

// Structured gesture description plus its canonical text rendering. The text
// grammar is frozen and documented in docs/description-grammar.md; rendering
// the same keyframes always produces byte-identical text.
struct GestureDescription {
  Handedness hand = Handedness::kRight;
  std::vector<PoseSummary> poses;
  std::vector<MotionDescriptor> moves;  // moves.size() == poses.size() - 1
  std::string text;
};

std::optional<Finger> finger_from_string(const std::string& s);

// Renders the canonical text: a `hand:` line, then pose and move lines
// interleaved (`pose[0]`, `move[0→1]`, `pose[1]`, ...). Lines are joined by
// '\n' with no trailing newline.
std::string render_description(Handedness hand,
                               std::span<const PoseSummary> poses,
                               std::span<const MotionDescriptor> moves);

// Builds the description for a keyframe sequence: per-keyframe pose summaries
// plus center-to-center trajectory between consecutive keyframes. A finger
// whose planar pointing is degenerate borrows the hand's in-plane direction.
// Throws EmptyGesture when the sequence is empty.
GestureDescription encode_gesture(std::span<const Keyframe> keyframes,
                                  const EncoderParams& params = {});

// Parses canonical description text back into its structured form (with
// `text` set to the input). Returns nullopt if the text does not follow the
// grammar. render_description(parse) reproduces the input byte-for-byte.
std::optional<GestureDescription> parse_description(const std::string& text);

}  // namespace gestos
