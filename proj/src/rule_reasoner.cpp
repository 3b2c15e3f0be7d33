#include "gestos/description.hpp"
#include "gestos/reasoner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace gestos {
namespace {

// Fleet command ids (manipulator arm + quadruped).
constexpr const char* kSelectLeft = "manipulator_select_left_item";
constexpr const char* kSelectRight = "manipulator_select_right_item";
constexpr const char* kCloseGripper = "manipulator_close_gripper";
constexpr const char* kOpenGripper = "manipulator_open_gripper";
constexpr const char* kHighFive = "manipulator_high_five";
constexpr const char* kTurnObject = "manipulator_turn_object_around";
constexpr const char* kGivePaw = "robodog_give_paw";
constexpr const char* kStandUp = "robodog_stand_up";
constexpr const char* kStandDown = "robodog_stand_down";
constexpr const char* kComeCloser = "robodog_come_closer";
constexpr const char* kWagTail = "robodog_wagging_tail";

enum class Horizontal { kLeft, kRight, kNone };

Horizontal horizontal_component(DirectionLabel d) {
  switch (d) {
    case DirectionLabel::kLeft:
    case DirectionLabel::kLeftUp:
    case DirectionLabel::kLeftDown:
      return Horizontal::kLeft;
    case DirectionLabel::kRight:
    case DirectionLabel::kRightUp:
    case DirectionLabel::kRightDown:
      return Horizontal::kRight;
    case DirectionLabel::kUp:
    case DirectionLabel::kDown:
      return Horizontal::kNone;
  }
  return Horizontal::kNone;
}

bool up_component(DirectionLabel d) {
  return d == DirectionLabel::kUp || d == DirectionLabel::kLeftUp ||
         d == DirectionLabel::kRightUp;
}

bool down_component(DirectionLabel d) {
  return d == DirectionLabel::kDown || d == DirectionLabel::kLeftDown ||
         d == DirectionLabel::kRightDown;
}

bool index_only(const PoseSummary& p) {
  return p.extended ==
         std::array<bool, 5>{false, true, false, false, false};
}

bool all_five(const PoseSummary& p) {
  return p.extended == std::array<bool, 5>{true, true, true, true, true};
}

bool none_extended(const PoseSummary& p) {
  return p.extended == std::array<bool, 5>{false, false, false, false, false};
}

std::optional<DirectionLabel> index_direction(const PoseSummary& p) {
  for (const auto& [finger, direction] : p.pointing) {
    if (finger == Finger::kIndex) return direction;
  }
  return std::nullopt;
}

// Merges consecutive poses that are identical up to grouping. Grouping churn
// (fingertips drifting across the contact threshold) creates extra keyframes
// without changing the pose's meaning, so sequence-shape rules look at this
// compressed view.
std::vector<PoseSummary> compress_poses(const std::vector<PoseSummary>& poses) {
  std::vector<PoseSummary> out;
  for (const PoseSummary& p : poses) {
    if (!out.empty() && out.back().extended == p.extended &&
        out.back().pointing == p.pointing && out.back().orientation == p.orientation) {
      continue;
    }
    out.push_back(p);
  }
  return out;
}

struct GestureFeatures {
  std::vector<PoseSummary> poses;       // as described
  std::vector<PoseSummary> compressed;  // grouping-churn removed
  std::vector<MotionDescriptor> moves;
  bool no_large_move = true;  // "static" in rule terms: jitter-tolerant
  bool has_up_large = false;
  bool has_down_large = false;
  PalmFacing facing = PalmFacing::kUnknown;  // first pose
};

GestureFeatures extract_features(const GestureDescription& desc) {
  GestureFeatures f;
  f.poses = desc.poses;
  f.compressed = compress_poses(desc.poses);
  f.moves = desc.moves;
  f.facing = desc.poses.front().orientation.facing;
  for (const MotionDescriptor& m : desc.moves) {
    if (m.magnitude != MotionMagnitude::kLarge) continue;
    f.no_large_move = false;
    if (m.direction.has_value() && up_component(*m.direction)) f.has_up_large = true;
    if (m.direction.has_value() && down_component(*m.direction)) f.has_down_large = true;
  }
  return f;
}

bool all_index_only(const std::vector<PoseSummary>& poses) {
  return std::all_of(poses.begin(), poses.end(), index_only);
}

bool all_all_five(const std::vector<PoseSummary>& poses) {
  return std::all_of(poses.begin(), poses.end(), all_five);
}

// True when every compressed pose points the index with the given horizontal
// component.
bool all_index_toward(const std::vector<PoseSummary>& poses, Horizontal side) {
  for (const PoseSummary& p : poses) {
    const auto d = index_direction(p);
    if (!d.has_value() || horizontal_component(*d) != side) return false;
  }
  return true;
}

// The index sweeps side to side: every compressed pose has a horizontal
// component, and collapsing consecutive equal components leaves at least
// three runs (left/right/left or right/left/right). Counting runs instead of
// demanding strict pose-by-pose alternation keeps the rule stable when a
// mid-swing pose splits into two keyframes.
bool index_alternation(const std::vector<PoseSummary>& poses) {
  int runs = 0;
  Horizontal prev = Horizontal::kNone;
  for (const PoseSummary& p : poses) {
    const auto d = index_direction(p);
    if (!d.has_value()) return false;
    const Horizontal h = horizontal_component(*d);
    if (h == Horizontal::kNone) return false;
    if (h != prev) {
      ++runs;
      prev = h;
    }
  }
  return runs >= 3;
}

struct FiredRule {
  std::string intent;
  std::string task;
  std::vector<std::string> commands;  // preference order
};

std::vector<FiredRule> fire_rules(const GestureFeatures& f) {
  std::vector<FiredRule> fired;
  const auto& cp = f.compressed;

  // Pointing rules: a steadily sideways index selects an item on that side.
  // (These cannot co-fire with the alternation rule: alternation needs both
  // horizontal signs.)
  if (all_index_only(cp) && all_index_toward(cp, Horizontal::kLeft)) {
    fired.push_back({"select left item", "Select the item positioned to the left.",
                     {kSelectLeft}});
  }
  if (all_index_only(cp) && all_index_toward(cp, Horizontal::kRight)) {
    fired.push_back({"select right item", "Select the item positioned to the right.",
                     {kSelectRight}});
  }

  // Grip rules: transitions between an open palm and a fist.
  if (cp.size() >= 2 && all_five(cp.front()) && none_extended(cp.back()) &&
      f.no_large_move) {
    fired.push_back({"close gripper", "Grasp the object.", {kCloseGripper}});
  }
  if (cp.size() >= 2 && none_extended(cp.front()) && all_five(cp.back()) &&
      f.no_large_move) {
    fired.push_back({"open gripper", "Release the object.", {kOpenGripper}});
  }

  // Open-palm rules, split by palm facing and vertical motion.
  if (all_all_five(cp) && f.facing == PalmFacing::kToward && f.no_large_move) {
    fired.push_back({"high five", "Give a high five to the user.", {kHighFive}});
  }
  if (all_all_five(cp) && f.facing == PalmFacing::kAway && f.no_large_move) {
    fired.push_back({"give paw", "Lift the front leg for a paw shake.", {kGivePaw}});
  }
  if (all_all_five(f.poses) && f.has_up_large && !f.has_down_large) {
    fired.push_back({"stand up", "Rise up.", {kStandUp}});
  }
  if (all_all_five(f.poses) && f.facing == PalmFacing::kAway && f.has_down_large &&
      !f.has_up_large) {
    fired.push_back({"stand down", "Sit or lie down.", {kStandDown}});
  }

  // Index alternation reads as rotating an object when the palm faces the
  // camera and as tail wagging when it faces away; both commands stay in the
  // candidate list so fleet feasibility can override the facing preference.
  if (all_index_only(cp) && index_alternation(cp)) {
    if (f.facing == PalmFacing::kAway) {
      fired.push_back({"wag tail", "Simulate tail wagging.", {kWagTail, kTurnObject}});
    } else {
      fired.push_back({"turn object around", "Rotate the object to show all sides.",
                       {kTurnObject, kWagTail}});
    }
  }

  // Curl cycle: open palm, curled interlude, open palm again beckons the
  // robot closer.
  if (cp.size() >= 3 && all_five(cp.front()) && all_five(cp.back()) &&
      std::any_of(cp.begin() + 1, cp.end() - 1,
                  [](const PoseSummary& p) { return !all_five(p); }) &&
      f.no_large_move) {
    fired.push_back({"come closer", "Approach the user.", {kComeCloser}});
  }

  return fired;
}

// Robots (sorted by id) whose schema holds the command.
std::vector<std::string> holders(std::span<const RobotSummary> robots,
                                 const std::string& command_id) {
  std::vector<std::string> ids;
  for (const RobotSummary& r : robots) {
    for (const auto& [id, description] : r.commands) {
      if (id == command_id) {
        ids.push_back(r.id);
        break;
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// The fleet context this rule table was written for: manipulator commands
// live on the arm, robodog commands on the quadruped. Used only when no
// registered robot holds the command, so that the candidate list still names
// the intended robot (feasibility filtering then judges it).
std::string context_robot(const std::string& command_id) {
  return command_id.rfind("robodog_", 0) == 0 ? "go1" : "ur3";
}

std::string normalize_task(const std::string& task) {
  std::string out;
  bool pending_space = false;
  for (const char c : task) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) != 0) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

struct FallbackEntry {
  const char* task;
  std::vector<const char*> commands;
};

// Static decomposition table for the explainer. Multi-step entries first so
// containment scans prefer the richer decompositions.
const std::vector<FallbackEntry>& fallback_table() {
  static const std::vector<FallbackEntry> table = {
      {"show me all sides of the object while holding it", {kCloseGripper, kTurnObject}},
      {"inspect object", {kCloseGripper, kTurnObject, kOpenGripper}},
      {"rotate the object to show all sides", {kCloseGripper, kTurnObject}},
      {"select the item positioned to the left", {kSelectLeft}},
      {"select the item positioned to the right", {kSelectRight}},
      {"grasp the object", {kCloseGripper}},
      {"release the object", {kOpenGripper}},
      {"give a high five to the user", {kHighFive}},
      {"lift the front leg for a paw shake", {kGivePaw}},
      {"rise up", {kStandUp}},
      {"sit or lie down", {kStandDown}},
      {"approach the user", {kComeCloser}},
      {"simulate tail wagging", {kWagTail}},
  };
  return table;
}

}  // namespace

IntentResult RuleReasoner::interpret(const ReasonerInput& input) {
  const auto desc = parse_description(input.description);
  if (!desc.has_value()) {
    throw UninterpretableGesture("description does not follow the canonical grammar");
  }

  const std::vector<FiredRule> fired = fire_rules(extract_features(*desc));
  if (fired.empty()) {
    throw UninterpretableGesture("no gesture rule matches this description");
  }

  IntentResult result;
  result.intent_label = fired.front().intent;
  result.task_description = fired.front().task;
  const double confidence = fired.size() == 1 ? 1.0 : 0.5;
  for (const FiredRule& rule : fired) {
    for (const std::string& command : rule.commands) {
      std::vector<std::string> robot_ids = holders(input.robots, command);
      if (robot_ids.empty()) robot_ids.push_back(context_robot(command));
      for (std::string& robot_id : robot_ids) {
        result.candidates.push_back(
            Candidate{std::move(robot_id), command, confidence});
      }
    }
  }
  return result;
}

Decomposition RuleReasoner::explain_decompose(const std::string& task_description,
                                              std::span<const RobotSummary> robots) {
  const std::string task = normalize_task(task_description);

  const FallbackEntry* match = nullptr;
  for (const FallbackEntry& entry : fallback_table()) {
    if (task == entry.task) {
      match = &entry;
      break;
    }
  }
  if (match == nullptr) {
    for (const FallbackEntry& entry : fallback_table()) {
      if (task.find(entry.task) != std::string::npos) {
        match = &entry;
        break;
      }
    }
  }
  if (match == nullptr) {
    throw NoFeasibleCommand("no fallback decomposition for task: " + task_description);
  }

  Decomposition result;
  for (const char* command : match->commands) {
    const std::vector<std::string> robot_ids = holders(robots, command);
    if (robot_ids.empty()) continue;  // schema validation drops the step
    result.subcommands.emplace_back(robot_ids.front(), command);
  }
  if (result.subcommands.empty()) {
    throw NoFeasibleCommand("fallback decomposition has no executable step");
  }
  result.rationale = "fallback table entry '" + std::string(match->task) + "'";
  return result;
}

}  // namespace gestos
