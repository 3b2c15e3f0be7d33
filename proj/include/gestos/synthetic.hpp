#pragma once

#include "gestos/encode.hpp"
#include "gestos/types.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gestos {

// Recipe for one synthetic hand pose. The generator is construction-first:
// finger tips are placed strictly beyond (extended) or inside (folded) the
// middle-joint radius by a verified margin, so the recipe doubles as ground
// truth for the encoder.
struct PoseSpec {
  Eigen::Vector2d wrist{0.5, 0.62};
  double axis_deg = 90.0;  // screen-math degrees: 0 = right, 90 = up
  std::array<bool, 5> extended{true, true, true, true, true};
  // Overrides the index finger's pointing direction (straight finger along
  // this heading); other extended fingers follow the axis.
  std::optional<double> index_dir_deg;
  PalmFacing facing = PalmFacing::kToward;
  Handedness hand = Handedness::kRight;
  double scale = 0.9;   // hand size; keep within [0.8, 1.0]
  bool spread = false;  // fan extended fingers apart (singleton grouping)
};

// Margin (in normalized units at scale 1) by which constructed tips clear the
// extension test; build_pose verifies it on every output frame.
inline constexpr double kExtensionMargin = 0.05;

// Builds the 21-landmark frame for a pose recipe. Throws Error if the
// constructed frame violates the extension-margin guarantee (a generator bug,
// never an input condition).
HandFrame build_pose(const PoseSpec& spec, double t = 0.0, double conf = 0.95);

// A timed sequence of poses rendered at fixed fps.
struct ScriptStep {
  PoseSpec pose;
  int frames = 6;
};

struct GestureScript {
  std::vector<ScriptStep> steps;
  double fps = 30.0;
  double conf = 0.95;
};

// Renders the script into frames: per-coordinate Gaussian jitter of
// jitter_sigma plus a constant global translation, x/y clamped into [0, 1].
// Pass rng = nullptr for a noise-free render (translation still applies).
std::vector<HandFrame> render_script(const GestureScript& script,
                                     std::mt19937_64* rng, double jitter_sigma,
                                     const Eigen::Vector2d& translation);

// The canonical gesture for each fleet command (the deterministic test
// vocabulary documented in docs/description-grammar.md), and the fleet
// context each command belongs to.
const std::vector<std::string>& canonical_commands();  // report row order
GestureScript canonical_gesture(const std::string& command_id);
std::string canonical_robot(const std::string& command_id);  // "ur3" / "go1"

}  // namespace gestos
