#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mcode/codec.hpp"

namespace mcode {

struct RegistryEntry {
  std::string label;
  MotionCode code;

  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

// Ordered label -> code table. Labels are unique; several labels may share a
// code (aliases).
class LabelRegistry {
 public:
  LabelRegistry() = default;

  // Throws Error("Registry") on a duplicate or unrepresentable label.
  void add(std::string label, const MotionCode& code);

  const std::vector<RegistryEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const RegistryEntry& operator[](std::size_t i) const { return entries_[i]; }

  bool contains(std::string_view label) const;
  // Position of label in registry order; throws UnknownLabel.
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const LabelRegistry& a, const LabelRegistry& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<RegistryEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// TSV: "label<TAB>code" per line, '#' comment lines and blank lines ignored.
// Every malformed line is reported (with its line number) in one ParseError.
LabelRegistry read_registry(std::istream& in);
void write_registry(std::ostream& out, const LabelRegistry& registry);
LabelRegistry load_registry(const std::filesystem::path& path);
void save_registry(const LabelRegistry& registry, const std::filesystem::path& path);

// The motion-code table for everyday manipulations, one entry per label.
// Rows listing several motions are split into one entry per motion; a
// parenthetical qualifier stays with the label it disambiguates.
LabelRegistry builtin_registry();

std::vector<std::string> labels_for_code(const LabelRegistry& registry, const MotionCode& code);
MotionCode code_for_label(const LabelRegistry& registry, std::string_view label);

}  // namespace mcode
