#include "mcode/registry.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mcode/error.hpp"

namespace mcode {

void LabelRegistry::add(std::string label, const MotionCode& code) {
  if (label.empty()) throw Error("Registry", "empty label");
  if (label.front() == '#') throw Error("Registry", "label '" + label + "' starts with '#'");
  if (label.find_first_of("\t\r\n") != std::string::npos) {
    throw Error("Registry", "label '" + label + "' contains a tab or line break");
  }
  validate(code);
  if (index_.contains(label)) throw Error("Registry", "duplicate label '" + label + "'");
  index_.emplace(label, entries_.size());
  entries_.push_back({std::move(label), code});
}

bool LabelRegistry::contains(std::string_view label) const {
  return index_.contains(std::string(label));
}

std::size_t LabelRegistry::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw UnknownLabel(std::string(label));
  return it->second;
}

LabelRegistry read_registry(std::istream& in) {
  LabelRegistry registry;
  std::vector<std::string> problems;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    auto report = [&](const std::string& what) {
      problems.push_back("line " + std::to_string(number) + ": " + what);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      report("expected 'label<TAB>code'");
      continue;
    }
    std::string label = line.substr(0, tab);
    std::string text = line.substr(tab + 1);
    try {
      const MotionCode code = parse_code(text);
      registry.add(std::move(label), code);
    } catch (const Error& e) {
      report(e.what());
    }
  }
  if (!problems.empty()) {
    std::string message = std::to_string(problems.size()) + " malformed registry line(s)";
    for (const auto& p : problems) message += "\n  " + p;
    throw ParseError("Registry", std::nullopt, message);
  }
  return registry;
}

void write_registry(std::ostream& out, const LabelRegistry& registry) {
  for (const auto& entry : registry.entries()) {
    out << entry.label << '\t' << format_code(entry.code) << '\n';
  }
}

LabelRegistry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open registry '" + path.string() + "'");
  return read_registry(in);
}

void save_registry(const LabelRegistry& registry, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write registry '" + path.string() + "'");
  write_registry(out, registry);
  if (!out) throw IoError("failed writing registry '" + path.string() + "'");
}

std::vector<std::string> labels_for_code(const LabelRegistry& registry, const MotionCode& code) {
  std::vector<std::string> labels;
  for (const auto& entry : registry.entries()) {
    if (entry.code == code) labels.push_back(entry.label);
  }
  return labels;
}

MotionCode code_for_label(const LabelRegistry& registry, std::string_view label) {
  return registry[registry.index_of(label)].code;
}

}  // namespace mcode
