#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mcode/codec.hpp"
#include "mcode/registry.hpp"

namespace mcode {

// Which leading bits take the alpha penalty. The default charges alpha on
// every bit of positions 0-6 (contact and structural); ContactOnly charges it
// on positions 0-2 and the unit penalty on the structural bits 3-6.
enum class AlphaScope { ContactAndStructural, ContactOnly };

// DegreesOfFreedom compares each prismatic/revolute field as a count: beta
// when exactly one side is zero, beta/2 when both move along a different
// number of axes. Bitwise charges beta per differing DOF bit, which with
// alpha = beta = unit = 1 reduces to the Hamming distance.
enum class TrajectoryRule { DegreesOfFreedom, Bitwise };

struct WeightConfig {
  double alpha = 1.0;  // contact/structural bits
  double beta = 1.0;   // trajectory movement
  double unit = 1.0;   // recurrence and tool bits
  AlphaScope alpha_scope = AlphaScope::ContactAndStructural;
  TrajectoryRule trajectory_rule = TrajectoryRule::DegreesOfFreedom;

  static WeightConfig contact_priority() { return {4.0, 1.0, 1.0}; }
  static WeightConfig trajectory_priority() { return {1.0, 4.0, 1.0}; }

  // Throws Error("Weights") on a negative or non-finite weight.
  void validate() const;
};

int hamming(const MotionCode& a, const MotionCode& b);
double weighted_distance(const MotionCode& a, const MotionCode& b, const WeightConfig& w);

class Metric {
 public:
  enum class Kind { Hamming, Weighted };

  static Metric hamming() { return Metric(Kind::Hamming, {}); }
  static Metric weighted(const WeightConfig& w);

  Kind kind() const noexcept { return kind_; }
  const WeightConfig& weights() const noexcept { return weights_; }
  double operator()(const MotionCode& a, const MotionCode& b) const;

 private:
  Metric(Kind kind, const WeightConfig& w) : kind_(kind), weights_(w) {}

  Kind kind_;
  WeightConfig weights_;
};

// Symmetric, zero-diagonal, non-negative. Input to t-SNE.
struct DistanceMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return labels.size(); }
  double at(std::string_view a, std::string_view b) const;
};

// Throws Error("Matrix") unless m is square, matches its labels, is symmetric
// within tolerance, has a zero diagonal and only finite non-negative entries.
void check_distance_matrix(const DistanceMatrix& m, double tolerance = 0.0);

// Rows are filled concurrently; each entry is computed independently, so the
// result equals kernels::serial::code_distances exactly.
DistanceMatrix distance_matrix(const LabelRegistry& registry, const Metric& metric);

// Header "label,<l1>,...,<ln>" then one row per label, values with 6 decimals.
void write_csv(std::ostream& out, const DistanceMatrix& matrix);

struct Neighbor {
  std::string label;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// k smallest distances, ties broken by registry order. Entries labelled
// `exclude` are skipped. k larger than the candidate count truncates.
std::vector<Neighbor> nearest(const MotionCode& code, const LabelRegistry& registry,
                              const Metric& metric, std::size_t k,
                              std::optional<std::string_view> exclude = std::nullopt);

// Query by label; the label itself is never returned.
std::vector<Neighbor> nearest(std::string_view label, const LabelRegistry& registry,
                              const Metric& metric, std::size_t k);

// Labels sharing an identical code, grouped in order of first appearance.
std::vector<std::vector<std::string>> consolidate(const LabelRegistry& registry);

}  // namespace mcode
