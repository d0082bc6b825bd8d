#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mcode {

// Motion codes are printed as 18 binary characters, position 0 leftmost:
//
//   0      interaction        (1 = contact)
//   1      engagement         (1 = soft, contact only)
//   2      duration           (1 = continuous, contact only)
//   3-4    active structure   [deforms][permanent]
//   5-6    passive structure  [deforms][permanent]
//   7-11   active trajectory  [recurrent][prismatic x2][revolute x2]
//   12-16  passive trajectory
//   17     tool               (1 = hand with tool)
inline constexpr std::size_t kCodeLength = 18;
inline constexpr std::size_t kTrajectoryLength = 5;

enum class Interaction : std::uint8_t { NonContact, Contact };
enum class Engagement : std::uint8_t { Rigid, Soft };
enum class Duration : std::uint8_t { Discontinuous, Continuous };
enum class ToolUse : std::uint8_t { HandOnly, HandWithTool };

// 00 non-deforming, 10 temporary deformation, 11 permanent deformation.
struct StructuralOutcome {
  bool deforms = false;
  bool permanent = false;

  static constexpr StructuralOutcome none() { return {false, false}; }
  static constexpr StructuralOutcome temporary() { return {true, false}; }
  static constexpr StructuralOutcome permanent_change() { return {true, true}; }

  friend bool operator==(const StructuralOutcome&, const StructuralOutcome&) = default;
};

struct TrajectoryDescriptor {
  bool recurrent = false;
  int prismatic_dof = 0;  // 0..3
  int revolute_dof = 0;   // 0..3

  friend bool operator==(const TrajectoryDescriptor&, const TrajectoryDescriptor&) = default;
};

struct MotionCode {
  Interaction interaction = Interaction::NonContact;
  Engagement engagement = Engagement::Rigid;
  Duration duration = Duration::Discontinuous;
  StructuralOutcome active_structure;
  StructuralOutcome passive_structure;
  TrajectoryDescriptor active_trajectory;
  TrajectoryDescriptor passive_trajectory;
  ToolUse tool = ToolUse::HandOnly;

  bool is_contact() const noexcept { return interaction == Interaction::Contact; }

  friend bool operator==(const MotionCode&, const MotionCode&) = default;
};

// Throws CodeError naming the first offending bit position.
MotionCode parse_code(std::string_view text);

// Throws CodeError if the structured value violates a taxonomy invariant
// (e.g. a DOF outside 0..3, or soft engagement on a non-contact code).
void validate(const MotionCode& code);

std::string format_code(const MotionCode& code);

// Packed form: string position i lives in bit (kCodeLength - 1 - i).
std::uint32_t pack(const MotionCode& code);
MotionCode unpack(std::uint32_t bits);

TrajectoryDescriptor parse_trajectory(std::string_view text);
std::string format_trajectory(const TrajectoryDescriptor& trajectory);

// Answers gathered by walking the taxonomy tree from the root: contact first,
// then (only for contact) engagement and duration, structural outcomes,
// trajectories, and finally the tool bit.
struct CodeAnswers {
  bool contact = false;
  std::optional<Engagement> engagement;
  std::optional<Duration> duration;
  StructuralOutcome active_structure;
  StructuralOutcome passive_structure;
  TrajectoryDescriptor active_trajectory;
  TrajectoryDescriptor passive_trajectory;
  bool tool = false;
};

// Throws InconsistentAnswers when contact-only answers are given for a
// non-contact motion, when a contact motion is missing them, or when an
// answer is out of range.
MotionCode build_code(const CodeAnswers& answers);

std::string_view to_string(Interaction value);
std::string_view to_string(Engagement value);
std::string_view to_string(Duration value);
std::string_view to_string(ToolUse value);
std::string_view describe(const StructuralOutcome& value);

}  // namespace mcode
