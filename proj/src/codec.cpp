#include "mcode/codec.hpp"

#include <algorithm>
#include <string>

#include "mcode/error.hpp"

namespace mcode {
namespace {

constexpr std::size_t kEngagementBit = 1;
constexpr std::size_t kDurationBit = 2;
constexpr std::size_t kActiveStructureBit = 3;
constexpr std::size_t kPassiveStructureBit = 5;
constexpr std::size_t kActiveTrajectoryBit = 7;
constexpr std::size_t kPassiveTrajectoryBit = 12;
constexpr std::size_t kToolBit = 17;

int read_pair(std::string_view text, std::size_t at) {
  return (text[at] == '1' ? 2 : 0) + (text[at + 1] == '1' ? 1 : 0);
}

StructuralOutcome read_structure(std::string_view text, std::size_t at) {
  if (text[at] == '0' && text[at + 1] == '1') {
    throw CodeError(CodeErrorKind::Structural, at + 1,
                    "bit " + std::to_string(at + 1) +
                        ": structural outcome '01' marks a permanent change without deformation");
  }
  return {text[at] == '1', text[at + 1] == '1'};
}

TrajectoryDescriptor read_trajectory(std::string_view text, std::size_t at) {
  return {text[at] == '1', read_pair(text, at + 1), read_pair(text, at + 3)};
}

void write_structure(std::string& out, const StructuralOutcome& s) {
  out.push_back(s.deforms ? '1' : '0');
  out.push_back(s.permanent ? '1' : '0');
}

void write_trajectory(std::string& out, const TrajectoryDescriptor& t) {
  out.push_back(t.recurrent ? '1' : '0');
  out.push_back((t.prismatic_dof & 2) ? '1' : '0');
  out.push_back((t.prismatic_dof & 1) ? '1' : '0');
  out.push_back((t.revolute_dof & 2) ? '1' : '0');
  out.push_back((t.revolute_dof & 1) ? '1' : '0');
}

void check_dof(int dof, std::size_t bit) {
  if (dof < 0 || dof > 3) {
    throw CodeError(CodeErrorKind::Alphabet, bit,
                    "bit " + std::to_string(bit) + ": DOF " + std::to_string(dof) +
                        " does not fit in two bits");
  }
}

void check_structure(const StructuralOutcome& s, std::size_t bit) {
  if (s.permanent && !s.deforms) {
    throw CodeError(CodeErrorKind::Structural, bit + 1,
                    "bit " + std::to_string(bit + 1) +
                        ": structural outcome '01' marks a permanent change without deformation");
  }
}

}  // namespace

MotionCode parse_code(std::string_view text) {
  if (text.size() != kCodeLength) {
    throw CodeError(CodeErrorKind::Length, std::min(text.size(), kCodeLength),
                    "expected " + std::to_string(kCodeLength) + " characters, got " +
                        std::to_string(text.size()));
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw CodeError(CodeErrorKind::Alphabet, i,
                      "bit " + std::to_string(i) + ": '" + std::string(1, text[i]) +
                          "' is not a binary digit");
    }
  }

  MotionCode code;
  code.interaction = text[0] == '1' ? Interaction::Contact : Interaction::NonContact;
  if (!code.is_contact()) {
    for (std::size_t bit : {kEngagementBit, kDurationBit}) {
      if (text[bit] == '1') {
        throw CodeError(CodeErrorKind::Hierarchy, bit,
                        "bit " + std::to_string(bit) +
                            ": engagement/duration set on a non-contact motion");
      }
    }
  }
  code.engagement = text[kEngagementBit] == '1' ? Engagement::Soft : Engagement::Rigid;
  code.duration = text[kDurationBit] == '1' ? Duration::Continuous : Duration::Discontinuous;
  code.active_structure = read_structure(text, kActiveStructureBit);
  code.passive_structure = read_structure(text, kPassiveStructureBit);
  code.active_trajectory = read_trajectory(text, kActiveTrajectoryBit);
  code.passive_trajectory = read_trajectory(text, kPassiveTrajectoryBit);
  code.tool = text[kToolBit] == '1' ? ToolUse::HandWithTool : ToolUse::HandOnly;
  return code;
}

void validate(const MotionCode& code) {
  if (!code.is_contact()) {
    if (code.engagement != Engagement::Rigid) {
      throw CodeError(CodeErrorKind::Hierarchy, kEngagementBit,
                      "bit 1: soft engagement on a non-contact motion");
    }
    if (code.duration != Duration::Discontinuous) {
      throw CodeError(CodeErrorKind::Hierarchy, kDurationBit,
                      "bit 2: continuous duration on a non-contact motion");
    }
  }
  check_structure(code.active_structure, kActiveStructureBit);
  check_structure(code.passive_structure, kPassiveStructureBit);
  check_dof(code.active_trajectory.prismatic_dof, kActiveTrajectoryBit + 1);
  check_dof(code.active_trajectory.revolute_dof, kActiveTrajectoryBit + 3);
  check_dof(code.passive_trajectory.prismatic_dof, kPassiveTrajectoryBit + 1);
  check_dof(code.passive_trajectory.revolute_dof, kPassiveTrajectoryBit + 3);
}

std::string format_code(const MotionCode& code) {
  validate(code);
  std::string out;
  out.reserve(kCodeLength);
  out.push_back(code.is_contact() ? '1' : '0');
  out.push_back(code.engagement == Engagement::Soft ? '1' : '0');
  out.push_back(code.duration == Duration::Continuous ? '1' : '0');
  write_structure(out, code.active_structure);
  write_structure(out, code.passive_structure);
  write_trajectory(out, code.active_trajectory);
  write_trajectory(out, code.passive_trajectory);
  out.push_back(code.tool == ToolUse::HandWithTool ? '1' : '0');
  return out;
}

std::uint32_t pack(const MotionCode& code) {
  const std::string text = format_code(code);
  std::uint32_t bits = 0;
  for (char c : text) bits = (bits << 1) | (c == '1' ? 1u : 0u);
  return bits;
}

MotionCode unpack(std::uint32_t bits) {
  std::string text(kCodeLength, '0');
  for (std::size_t i = 0; i < kCodeLength; ++i) {
    if (bits & (1u << (kCodeLength - 1 - i))) text[i] = '1';
  }
  return parse_code(text);
}

TrajectoryDescriptor parse_trajectory(std::string_view text) {
  if (text.size() != kTrajectoryLength) {
    throw CodeError(CodeErrorKind::Length, std::min(text.size(), kTrajectoryLength),
                    "expected 5 trajectory characters, got " + std::to_string(text.size()));
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw CodeError(CodeErrorKind::Alphabet, i,
                      "bit " + std::to_string(i) + ": '" + std::string(1, text[i]) +
                          "' is not a binary digit");
    }
  }
  return read_trajectory(text, 0);
}

std::string format_trajectory(const TrajectoryDescriptor& trajectory) {
  check_dof(trajectory.prismatic_dof, 1);
  check_dof(trajectory.revolute_dof, 3);
  std::string out;
  write_trajectory(out, trajectory);
  return out;
}

MotionCode build_code(const CodeAnswers& answers) {
  MotionCode code;
  if (answers.contact) {
    if (!answers.engagement || !answers.duration) {
      throw InconsistentAnswers("a contact motion needs both an engagement and a duration answer");
    }
    code.interaction = Interaction::Contact;
    code.engagement = *answers.engagement;
    code.duration = *answers.duration;
  } else if (answers.engagement || answers.duration) {
    throw InconsistentAnswers("engagement and duration only apply to contact motions");
  }
  code.active_structure = answers.active_structure;
  code.passive_structure = answers.passive_structure;
  code.active_trajectory = answers.active_trajectory;
  code.passive_trajectory = answers.passive_trajectory;
  code.tool = answers.tool ? ToolUse::HandWithTool : ToolUse::HandOnly;
  try {
    validate(code);
  } catch (const CodeError& e) {
    throw InconsistentAnswers(e.what());
  }
  return code;
}

std::string_view to_string(Interaction value) {
  return value == Interaction::Contact ? "contact" : "non-contact";
}

std::string_view to_string(Engagement value) {
  return value == Engagement::Soft ? "soft" : "rigid";
}

std::string_view to_string(Duration value) {
  return value == Duration::Continuous ? "continuous" : "discontinuous";
}

std::string_view to_string(ToolUse value) {
  return value == ToolUse::HandWithTool ? "hand with tool" : "hand only";
}

std::string_view describe(const StructuralOutcome& value) {
  if (!value.deforms) return "none";
  return value.permanent ? "permanent" : "temporary";
}

}  // namespace mcode
