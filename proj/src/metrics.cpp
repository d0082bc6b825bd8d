#include "mcode/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "mcode/csv.hpp"
#include "mcode/error.hpp"
#include "mcode/kernels.hpp"

namespace mcode {
namespace {

int differs(bool a, bool b) { return a != b ? 1 : 0; }

// Leading bits: 0-2 contact, 3-6 structural.
int contact_bits_differing(const MotionCode& a, const MotionCode& b) {
  return differs(a.interaction == Interaction::Contact, b.interaction == Interaction::Contact) +
         differs(a.engagement == Engagement::Soft, b.engagement == Engagement::Soft) +
         differs(a.duration == Duration::Continuous, b.duration == Duration::Continuous);
}

int structural_bits_differing(const MotionCode& a, const MotionCode& b) {
  return differs(a.active_structure.deforms, b.active_structure.deforms) +
         differs(a.active_structure.permanent, b.active_structure.permanent) +
         differs(a.passive_structure.deforms, b.passive_structure.deforms) +
         differs(a.passive_structure.permanent, b.passive_structure.permanent);
}

double dof_cost(int a, int b, const WeightConfig& w) {
  if (w.trajectory_rule == TrajectoryRule::Bitwise) {
    return w.beta * std::popcount(static_cast<unsigned>(a ^ b));
  }
  if (a == b) return 0.0;
  if (a == 0 || b == 0) return w.beta;
  return 0.5 * w.beta;
}

double trajectory_cost(const TrajectoryDescriptor& a, const TrajectoryDescriptor& b,
                       const WeightConfig& w) {
  return dof_cost(a.prismatic_dof, b.prismatic_dof, w) + dof_cost(a.revolute_dof, b.revolute_dof, w) +
         w.unit * differs(a.recurrent, b.recurrent);
}

}  // namespace

void WeightConfig::validate() const {
  for (double v : {alpha, beta, unit}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error("Weights", "weights must be finite and non-negative (alpha=" + std::to_string(alpha) +
                                 ", beta=" + std::to_string(beta) + ", unit=" + std::to_string(unit) + ")");
    }
  }
}

int hamming(const MotionCode& a, const MotionCode& b) {
  return std::popcount(pack(a) ^ pack(b));
}

double weighted_distance(const MotionCode& a, const MotionCode& b, const WeightConfig& w) {
  const int contact = contact_bits_differing(a, b);
  const int structural = structural_bits_differing(a, b);
  double d = w.alpha_scope == AlphaScope::ContactAndStructural
                 ? w.alpha * (contact + structural)
                 : w.alpha * contact + w.unit * structural;
  d += trajectory_cost(a.active_trajectory, b.active_trajectory, w);
  d += trajectory_cost(a.passive_trajectory, b.passive_trajectory, w);
  d += w.unit * differs(a.tool == ToolUse::HandWithTool, b.tool == ToolUse::HandWithTool);
  return d;
}

Metric Metric::weighted(const WeightConfig& w) {
  w.validate();
  return Metric(Kind::Weighted, w);
}

double Metric::operator()(const MotionCode& a, const MotionCode& b) const {
  if (kind_ == Kind::Hamming) return static_cast<double>(mcode::hamming(a, b));
  return weighted_distance(a, b, weights_);
}

double DistanceMatrix::at(std::string_view a, std::string_view b) const {
  auto find = [&](std::string_view label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw UnknownLabel(std::string(label));
    return static_cast<Eigen::Index>(it - labels.begin());
  };
  return values(find(a), find(b));
}

void check_distance_matrix(const DistanceMatrix& m, double tolerance) {
  const auto n = static_cast<Eigen::Index>(m.labels.size());
  if (m.values.rows() != n || m.values.cols() != n) {
    throw Error("Matrix", "distance matrix is " + std::to_string(m.values.rows()) + "x" +
                              std::to_string(m.values.cols()) + " but has " + std::to_string(n) +
                              " labels");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.values(i, i) != 0.0) {
      throw Error("Matrix", "non-zero diagonal at '" + m.labels[i] + "'");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = m.values(i, j);
      const double b = m.values(j, i);
      if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
        throw Error("Matrix", "negative or non-finite distance between '" + m.labels[i] + "' and '" +
                                  m.labels[j] + "'");
      }
      if (std::abs(a - b) > tolerance) {
        throw Error("Matrix", "matrix is not symmetric at ('" + m.labels[i] + "', '" + m.labels[j] + "')");
      }
    }
  }
}

DistanceMatrix distance_matrix(const LabelRegistry& registry, const Metric& metric) {
  DistanceMatrix result;
  std::vector<MotionCode> codes;
  codes.reserve(registry.size());
  for (const auto& entry : registry.entries()) {
    result.labels.push_back(entry.label);
    codes.push_back(entry.code);
  }
  kernels::parallel::code_distances(codes, metric, result.values);
  return result;
}

void write_csv(std::ostream& out, const DistanceMatrix& matrix) {
  std::vector<std::string> row{"label"};
  row.insert(row.end(), matrix.labels.begin(), matrix.labels.end());
  csv::write_row(out, row);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    row.assign(1, matrix.labels[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      row.push_back(csv::fixed(matrix.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 6));
    }
    csv::write_row(out, row);
  }
}

std::vector<Neighbor> nearest(const MotionCode& code, const LabelRegistry& registry,
                              const Metric& metric, std::size_t k,
                              std::optional<std::string_view> exclude) {
  if (k == 0) throw Error("Usage", "k must be at least 1");
  std::vector<Neighbor> all;
  all.reserve(registry.size());
  for (const auto& entry : registry.entries()) {
    if (exclude && entry.label == *exclude) continue;
    all.push_back({entry.label, metric(code, entry.code)});
  }
  // stable_sort keeps registry order among equal distances.
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; });
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<Neighbor> nearest(std::string_view label, const LabelRegistry& registry,
                              const Metric& metric, std::size_t k) {
  return nearest(code_for_label(registry, label), registry, metric, k, label);
}

std::vector<std::vector<std::string>> consolidate(const LabelRegistry& registry) {
  std::vector<std::vector<std::string>> groups;
  std::vector<MotionCode> keys;
  for (const auto& entry : registry.entries()) {
    auto it = std::find(keys.begin(), keys.end(), entry.code);
    if (it == keys.end()) {
      keys.push_back(entry.code);
      groups.push_back({entry.label});
    } else {
      groups[static_cast<std::size_t>(it - keys.begin())].push_back(entry.label);
    }
  }
  return groups;
}

}  // namespace mcode
