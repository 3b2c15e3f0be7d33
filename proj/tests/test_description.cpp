#include "gestos/description.hpp"

#include "gestos/keyframe.hpp"
#include "gestos/synthetic.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <string>
#include <vector>

using namespace gestos;

namespace {

std::vector<Keyframe> keyframes_of(const GestureScript& script) {
  const auto frames = render_script(script, nullptr, 0.0, {0.0, 0.0});
  return select_keyframes(frames);
}

GestureScript single_step(PoseSpec pose, int frames = 8) {
  GestureScript script;
  script.steps = {{pose, frames}};
  return script;
}

}  // namespace

TEST_CASE("a single pointing pose renders the full pose line") {
  PoseSpec spec;
  spec.wrist = {0.8, 0.5};
  spec.axis_deg = 180.0;
  spec.extended = {false, true, false, false, false};
  spec.index_dir_deg = 180.0;

  const auto kfs = keyframes_of(single_step(spec));
  REQUIRE(kfs.size() == 1);
  const GestureDescription desc = encode_gesture(kfs);

  CHECK(desc.text ==
        "hand: right\n"
        "pose[0]: fingers=index; pointing=index:left; groups=(index); "
        "orientation=toward left");
  CHECK(desc.poses.size() == 1);
  CHECK(desc.moves.empty());
}

TEST_CASE("a fist pose renders none for fingers, pointing, and groups") {
  PoseSpec spec;
  spec.extended = {false, false, false, false, false};
  const auto kfs = keyframes_of(single_step(spec));
  REQUIRE(kfs.size() == 1);
  const GestureDescription desc = encode_gesture(kfs);
  CHECK(desc.text ==
        "hand: right\n"
        "pose[0]: fingers=none; pointing=none; groups=none; "
        "orientation=toward up");
}

TEST_CASE("moves interleave between poses with the arrow notation") {
  PoseSpec start;  // open hand
  PoseSpec left = start;
  left.wrist.x() -= 0.15;

  GestureScript script;
  script.steps = {{start, 6}, {left, 6}};
  const auto kfs = keyframes_of(script);
  REQUIRE(kfs.size() == 2);
  const GestureDescription desc = encode_gesture(kfs);

  REQUIRE(desc.moves.size() == 1);
  CHECK(desc.moves[0].magnitude == MotionMagnitude::kLarge);
  CHECK(desc.moves[0].direction == DirectionLabel::kLeft);
  CHECK(desc.text.find("move[0→1]: left large") != std::string::npos);

  // Line order: hand, pose[0], move[0->1], pose[1].
  const auto hand_at = desc.text.find("hand:");
  const auto p0 = desc.text.find("pose[0]:");
  const auto mv = desc.text.find("move[0→1]:");
  const auto p1 = desc.text.find("pose[1]:");
  CHECK(hand_at == 0);
  CHECK(p0 != std::string::npos);
  CHECK(mv != std::string::npos);
  CHECK(p1 != std::string::npos);
  CHECK(p0 < mv);
  CHECK(mv < p1);
}

TEST_CASE("a stationary transition renders as stationary with no direction") {
  PoseSpec open;
  PoseSpec fist = open;
  fist.extended = {false, false, false, false, false};
  GestureScript script;
  script.steps = {{open, 6}, {fist, 6}};
  const auto kfs = keyframes_of(script);
  REQUIRE(kfs.size() == 2);
  const GestureDescription desc = encode_gesture(kfs);
  CHECK(desc.text.find("move[0→1]: stationary") != std::string::npos);
}

TEST_CASE("left-hand gestures carry the hand line") {
  PoseSpec spec;
  spec.hand = Handedness::kLeft;
  const auto kfs = keyframes_of(single_step(spec));
  REQUIRE(!kfs.empty());
  CHECK(encode_gesture(kfs).text.rfind("hand: left\n", 0) == 0);
}

TEST_CASE("encode_gesture rejects an empty keyframe sequence") {
  CHECK_THROWS_AS(encode_gesture({}), EmptyGesture);
}

TEST_CASE("rendering is deterministic byte-for-byte") {
  const GestureScript script = canonical_gesture("manipulator_close_gripper");
  const auto kfs = keyframes_of(script);
  const std::string a = encode_gesture(kfs).text;
  const std::string b = encode_gesture(kfs).text;
  CHECK(a == b);
  CHECK(a.back() != '\n');  // no trailing newline
}

TEST_CASE("parse_description inverts rendering on every canonical gesture") {
  for (const std::string& command : canonical_commands()) {
    CAPTURE(command);
    const auto kfs = keyframes_of(canonical_gesture(command));
    REQUIRE(!kfs.empty());
    const GestureDescription desc = encode_gesture(kfs);

    const auto parsed = parse_description(desc.text);
    REQUIRE(parsed.has_value());
    CHECK(parsed->hand == desc.hand);
    REQUIRE(parsed->poses.size() == desc.poses.size());
    for (size_t i = 0; i < desc.poses.size(); ++i) {
      CHECK(parsed->poses[i] == desc.poses[i]);
    }
    REQUIRE(parsed->moves.size() == desc.moves.size());
    for (size_t i = 0; i < desc.moves.size(); ++i) {
      CHECK(parsed->moves[i] == desc.moves[i]);
    }

    // Re-rendering the parse reproduces the text byte-for-byte.
    CHECK(render_description(parsed->hand, parsed->poses, parsed->moves) ==
          desc.text);
  }
}

TEST_CASE("parse_description rejects text off the grammar") {
  const std::string good =
      "hand: right\n"
      "pose[0]: fingers=index; pointing=index:left; groups=(index); "
      "orientation=toward left";
  REQUIRE(parse_description(good).has_value());

  SUBCASE("missing hand line") {
    CHECK_FALSE(parse_description(
        "pose[0]: fingers=none; pointing=none; groups=none; "
        "orientation=toward up"));
  }
  SUBCASE("bad pose index") {
    std::string text = good;
    text.replace(text.find("pose[0]"), 7, "pose[1]");
    CHECK_FALSE(parse_description(text));
  }
  SUBCASE("pointing by a folded finger") {
    std::string text = good;
    text.replace(text.find("pointing=index:left"), 19, "pointing=ring:left");
    CHECK_FALSE(parse_description(text));
  }
  SUBCASE("groups not covering the extended set") {
    std::string text = good;
    text.replace(text.find("groups=(index)"), 14, "groups=none");
    CHECK_FALSE(parse_description(text));
  }
  SUBCASE("unknown direction word") {
    std::string text = good;
    text.replace(text.find("toward left"), 11, "toward sideways");
    CHECK_FALSE(parse_description(text));
  }
  SUBCASE("move without a following pose") {
    CHECK_FALSE(parse_description(good + "\nmove[0→1]: left large"));
  }
  SUBCASE("empty text") { CHECK_FALSE(parse_description("")); }
}

TEST_CASE("descriptions use comma lists without spaces") {
  PoseSpec spec;  // all five extended; four fingers cluster, the thumb apart
  const auto kfs = keyframes_of(single_step(spec));
  REQUIRE(!kfs.empty());
  const GestureDescription desc = encode_gesture(kfs);
  CHECK(desc.text.find("fingers=thumb,index,middle,ring,pinky") !=
        std::string::npos);
  CHECK(desc.text.find("groups=(thumb),(index,middle,ring,pinky)") !=
        std::string::npos);
  CHECK(desc.text.find(", ") == std::string::npos);
  CHECK(desc.poses[0].groups.size() == 2);
}
