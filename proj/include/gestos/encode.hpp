#pragma once

#include "gestos/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gestos {

// Eight-way compass label for an image-plane direction. Image y grows
// downward, so "up" means decreasing y. Sectors are half-open 45-degree
// wedges centered on the eight compass headings: a direction belongs to
// [center - 22.5deg, center + 22.5deg).
enum class DirectionLabel {
  kRight = 0,
  kRightUp = 1,
  kUp = 2,
  kLeftUp = 3,
  kLeft = 4,
  kLeftDown = 5,
  kDown = 6,
  kRightDown = 7,
};

std::string to_string(DirectionLabel d);
std::optional<DirectionLabel> direction_from_string(const std::string& s);

enum class PalmFacing { kToward, kAway, kUnknown };

std::string to_string(PalmFacing f);

struct Orientation {
  PalmFacing facing = PalmFacing::kUnknown;
  DirectionLabel direction = DirectionLabel::kUp;  // wrist toward middle knuckle

  bool operator==(const Orientation&) const = default;
};

enum class MotionMagnitude { kStationary, kSmall, kLarge };

std::string to_string(MotionMagnitude m);

// Image-plane movement between two successive key poses. Stationary motion
// carries no direction.
struct MotionDescriptor {
  std::optional<DirectionLabel> direction;
  MotionMagnitude magnitude = MotionMagnitude::kStationary;

  bool operator==(const MotionDescriptor&) const = default;
};

struct EncoderParams {
  double grouping_scale = 0.5;   // fingertip adjacency radius, x palm width
  double stationary_below = 0.02;  // planar distance thresholds between poses
  double large_from = 0.10;
};

// Classifies a planar displacement (image coordinates) into a compass label.
// Returns nullopt for the zero vector.
std::optional<DirectionLabel> direction_label(const Eigen::Vector2d& delta);

// Heading angle in degrees for screen-math axes (0 = right, 90 = up) mapped
// into [0, 360). Used by direction_label; exposed for tests.
double heading_degrees(const Eigen::Vector2d& delta);

// Per-finger extension flags, indexed by Finger order (thumb first).
// A non-thumb finger is extended when its tip is strictly farther from the
// wrist than its middle joint (3D distances). The thumb compares tip and its
// last joint against the pinky knuckle instead, which keeps the test
// meaningful for the thumb's sideways geometry.
std::array<bool, 5> finger_states(const HandFrame& frame);

// Image-plane pointing direction of a finger (knuckle toward tip). Returns
// nullopt when the planar projection is degenerate (tip above knuckle).
std::optional<DirectionLabel> point_direction(const HandFrame& frame, Finger f);

// Partition of the extended fingers into proximity groups: two extended
// fingers connect when their tips are within grouping_scale x palm width (3D
// distance), and groups are the connected components. Folded fingers do not
// appear, so a fist yields the empty partition. Canonical form: each group
// sorted by finger order, groups sorted by their first member. A degenerate
// palm width (< 1e-6) yields singletons of the extended fingers.
std::vector<std::vector<Finger>> finger_groups(const HandFrame& frame,
                                               double grouping_scale = 0.5);

// Palm facing (camera-relative, handedness-aware) plus the in-plane direction
// from the wrist to the middle-finger knuckle. A degenerate triangle
// (wrist/index/pinky knuckles nearly collinear) gives kUnknown facing.
Orientation hand_orientation(const HandFrame& frame);

// Buckets the displacement between two pose centers. Below stationary_below
// the motion is stationary (no direction); from large_from upward it is
// large; in between, small.
MotionDescriptor trajectory(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                            const EncoderParams& params = {});

}  // namespace gestos
