#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mcode {

// Base for every error raised by the library. category() is the stable tag the
// CLI prints as "E<category>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

enum class CodeErrorKind { Length, Alphabet, Hierarchy, Structural };

// Rejected code string. bit() is the offending position, counted from the
// leftmost character (position 0).
class CodeError : public Error {
 public:
  CodeError(CodeErrorKind kind, std::size_t bit, const std::string& message)
      : Error(category_for(kind), message), kind_(kind), bit_(bit) {}

  CodeErrorKind kind() const noexcept { return kind_; }
  std::size_t bit() const noexcept { return bit_; }

 private:
  static std::string category_for(CodeErrorKind kind) {
    switch (kind) {
      case CodeErrorKind::Length: return "Length";
      case CodeErrorKind::Alphabet: return "Alphabet";
      case CodeErrorKind::Hierarchy: return "Hierarchy";
      case CodeErrorKind::Structural: return "Structural";
    }
    return "Code";
  }

  CodeErrorKind kind_;
  std::size_t bit_;
};

class InconsistentAnswers : public Error {
 public:
  explicit InconsistentAnswers(const std::string& message)
      : Error("InconsistentAnswers", message) {}
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(const std::string& label)
      : Error("UnknownLabel", "unknown label '" + label + "'"), label_(label) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

// Error tied to a line of an input file (registry, trajectory, word vectors).
// line() is 1-based; empty when the problem is not attributable to one line.
class ParseError : public Error {
 public:
  ParseError(std::string category, std::optional<std::size_t> line, const std::string& message)
      : Error(std::move(category), line ? "line " + std::to_string(*line) + ": " + message : message),
        line_(line) {}

  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::optional<std::size_t> line_;
};

class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& message) : Error("Analysis", message) {}
};

class TsneError : public Error {
 public:
  explicit TsneError(const std::string& message) : Error("Tsne", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("Io", message) {}
};

}  // namespace mcode
