#include "mcode/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "mcode/csv.hpp"
#include "mcode/error.hpp"

namespace mcode {
namespace {

constexpr std::string_view kHeader = "t,x,y,z,qw,qx,qy,qz";
constexpr std::string_view kToolAxesTag = "tool_axes:";

double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

void check_tool_axes(const Eigen::Matrix3d& axes, std::optional<std::size_t> line) {
  const double err = (axes.transpose() * axes - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= kToolAxesTolerance)) {
    throw ParseError("Trajectory", line, "tool axes are not orthonormal (max deviation " + std::to_string(err) + ")");
  }
}

Eigen::Matrix3d parse_tool_axes(std::string_view text, std::size_t line) {
  std::string cleaned(text);
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::replace(cleaned.begin(), cleaned.end(), ';', ' ');
  std::istringstream in(cleaned);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    double v = 0.0;
    if (!parse_double(token, v)) throw ParseError("Trajectory", line, "bad tool axis value '" + token + "'");
    values.push_back(v);
  }
  if (values.size() != 9) {
    throw ParseError("Trajectory", line, "tool_axes needs 9 numbers, got " + std::to_string(values.size()));
  }
  Eigen::Matrix3d axes;
  for (int k = 0; k < 3; ++k) axes.col(k) = Eigen::Vector3d(values[3 * k], values[3 * k + 1], values[3 * k + 2]);
  check_tool_axes(axes, line);
  return axes;
}

void check_sample(const PoseSample& s, const PoseSample* previous, std::optional<std::size_t> line) {
  const double norm = s.orientation.coeffs().norm();
  if (!(std::abs(norm - 1.0) <= kQuaternionNormTolerance)) {
    throw ParseError("Trajectory", line, "quaternion norm " + std::to_string(norm) + " is not within 1e-3 of 1");
  }
  if (previous && !(s.t > previous->t)) {
    throw ParseError("Trajectory", line, "time stamps must strictly increase (" + std::to_string(previous->t) +
                                              " then " + std::to_string(s.t) + ")");
  }
}

void sort_descending(Eigen::Vector3d& values, Eigen::Matrix3d& vectors) {
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values(a) > values(b); });
  const Eigen::Vector3d v = values;
  const Eigen::Matrix3d m = vectors;
  for (int k = 0; k < 3; ++k) {
    values(k) = std::max(v(order[k]), 0.0);
    vectors.col(k) = m.col(order[k]);
    // Sign convention: largest-magnitude coordinate positive.
    Eigen::Index arg = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
  }
}

double angle_between_degrees(const Eigen::Vector3d& unit_a, const Eigen::Vector3d& unit_b) {
  return degrees(std::acos(std::clamp(unit_a.dot(unit_b), -1.0, 1.0)));
}

nlohmann::json histogram_json(const AngleHistogram& h) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i <= AngleHistogram::kBins; ++i) edges.push_back(AngleHistogram::edge(i));
  return {{"bin_edges_deg", edges}, {"counts", h.counts}};
}

nlohmann::json vec_json(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }

}  // namespace

Trajectory::Trajectory(std::vector<PoseSample> samples, const Eigen::Matrix3d& tool_axes)
    : samples_(std::move(samples)), tool_axes_(tool_axes) {
  check_tool_axes(tool_axes_, std::nullopt);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    check_sample(samples_[i], i ? &samples_[i - 1] : nullptr, std::nullopt);
    samples_[i].orientation.normalize();
  }
}

Trajectory read_trajectory(std::istream& in) {
  std::vector<PoseSample> samples;
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();
  bool header_seen = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view body = trim(text.substr(1));
      if (body.starts_with(kToolAxesTag)) axes = parse_tool_axes(body.substr(kToolAxesTag.size()), line);
      continue;
    }
    if (!header_seen) {
      std::string compact;
      for (char c : text) {
        if (c != ' ' && c != '\t') compact += c;
      }
      if (compact != kHeader) {
        throw ParseError("Trajectory", line, "expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = csv::parse_row(text);
    if (fields.size() != 8) {
      throw ParseError("Trajectory", line, "expected 8 fields, got " + std::to_string(fields.size()));
    }
    std::array<double, 8> v{};
    for (std::size_t k = 0; k < 8; ++k) {
      if (!parse_double(fields[k], v[k])) {
        throw ParseError("Trajectory", line, "field " + std::to_string(k + 1) + " ('" + fields[k] +
                                                 "') is not a finite number");
      }
    }
    PoseSample s;
    s.t = v[0];
    s.position = Eigen::Vector3d(v[1], v[2], v[3]);
    s.orientation = Eigen::Quaterniond(v[4], v[5], v[6], v[7]);
    check_sample(s, samples.empty() ? nullptr : &samples.back(), line);
    samples.push_back(s);
  }
  if (!header_seen) throw ParseError("Trajectory", std::nullopt, "missing header '" + std::string(kHeader) + "'");
  return Trajectory(std::move(samples), axes);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory '" + path.string() + "'");
  return read_trajectory(in);
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  const Eigen::Matrix3d& a = trajectory.tool_axes();
  if (!a.isIdentity(0.0)) {
    out.precision(17);
    out << "# tool_axes:";
    for (int k = 0; k < 3; ++k) {
      out << (k ? "; " : " ") << a(0, k) << ' ' << a(1, k) << ' ' << a(2, k);
    }
    out << '\n';
  }
  out << kHeader << '\n';
  out.precision(17);
  for (const auto& s : trajectory.samples()) {
    const auto& q = s.orientation;
    out << s.t << ',' << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ',' << q.w() << ','
        << q.x() << ',' << q.y() << ',' << q.z() << '\n';
  }
}

void AngleHistogram::add(double deg) {
  const double clamped = std::clamp(deg, 0.0, 180.0);
  auto bin = static_cast<std::size_t>(clamped / (180.0 / kBins));
  counts[std::min(bin, kBins - 1)] += 1;
}

std::size_t AngleHistogram::total() const {
  std::size_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::size_t AngleHistogram::peak_bin() const {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

PrismaticAnalysis prismatic_analysis(const Trajectory& trajectory, const PrismaticOptions& options) {
  const auto& samples = trajectory.samples();
  const std::size_t n = samples.size();
  if (n < 3) throw AnalysisError("prismatic analysis needs at least 3 samples, got " + std::to_string(n));

  PrismaticAnalysis result;
  for (const auto& s : samples) result.mean += s.position;
  result.mean /= static_cast<double>(n);
  for (const auto& s : samples) {
    const Eigen::Vector3d c = s.position - result.mean;
    result.covariance += c * c.transpose();
  }
  result.covariance /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(result.covariance);
  result.eigenvalues = solver.eigenvalues();
  result.components = solver.eigenvectors();
  sort_descending(result.eigenvalues, result.components);

  const double total = result.eigenvalues.sum();
  result.total_std = std::sqrt(std::max(result.covariance.trace(), 0.0));
  if (total > 0.0) {
    result.variance_ratios = result.eigenvalues / total;
  } else {
    result.variance_ratios = Eigen::Vector3d::Constant(1.0 / 3.0);
  }

  if (result.total_std >= options.motion_floor) {
    double cumulative = 0.0;
    result.dof = 3;
    for (int k = 0; k < 3; ++k) {
      cumulative += result.variance_ratios(k);
      if (cumulative >= options.variance_threshold) {
        result.dof = k + 1;
        break;
      }
    }
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Eigen::Vector3d v = (samples[i + 1].position - samples[i].position) / (samples[i + 1].t - samples[i].t);
    const double speed = v.norm();
    if (speed <= 0.0) continue;
    const Eigen::Vector3d dir = v / speed;
    for (int k = 0; k < 3; ++k) {
      result.alignment[k].add(angle_between_degrees(dir, result.components.col(k)));
    }
  }
  return result;
}

AxisAngle axis_angle_from_rotation(const Eigen::Matrix3d& r) {
  AxisAngle out;
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  out.angle = std::acos(c);
  if (out.angle < kMinStepAngle) return out;

  const double s = std::sin(out.angle);
  if (s < 1e-3) {
    // Close to pi the skew part vanishes; the quaternion keeps the axis.
    Eigen::Quaterniond q(r);
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const double vn = q.vec().norm();
    out.angle = 2.0 * std::atan2(vn, q.w());
    out.axis = q.vec() / vn;
  } else {
    out.axis = Eigen::Vector3d(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) / (2.0 * s);
    out.axis.normalize();
  }
  out.defined = true;
  return out;
}

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d k = axis.normalized();
  Eigen::Matrix3d skew;
  skew << 0.0, -k.z(), k.y(),
          k.z(), 0.0, -k.x(),
          -k.y(), k.x(), 0.0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * skew + (1.0 - std::cos(angle)) * skew * skew;
}

RevoluteAnalysis revolute_analysis(const Trajectory& trajectory, double rotation_threshold) {
  const auto& samples = trajectory.samples();
  if (samples.size() < 2) {
    throw AnalysisError("revolute analysis needs at least 2 samples, got " + std::to_string(samples.size()));
  }
  const Eigen::Matrix3d& axes = trajectory.tool_axes();

  RevoluteAnalysis result;
  result.steps.reserve(samples.size() - 1);
  Eigen::Matrix3d current = samples.front().orientation.toRotationMatrix();
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const Eigen::Matrix3d next = samples[i + 1].orientation.toRotationMatrix();
    const AxisAngle step = axis_angle_from_rotation(current.transpose() * next);
    result.steps.push_back(step);
    current = next;
    if (!step.defined) continue;
    for (int k = 0; k < 3; ++k) {
      const double cosine = std::clamp(step.axis.dot(axes.col(k)), -1.0, 1.0);
      result.axis_similarity[k].add(degrees(std::acos(cosine)));
      result.cumulative_rotation(k) += step.angle * cosine;
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (std::abs(result.cumulative_rotation(k)) >= rotation_threshold) ++result.dof;
  }
  return result;
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  std::vector<double> acf;
  if (n == 0) return acf;
  max_lag = std::min(max_lag, n - 1);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double variance = 0.0;
  for (double v : series) variance += (v - mean) * (v - mean);
  acf.assign(max_lag + 1, 0.0);
  if (variance <= 0.0) return acf;
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double sum = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) sum += (series[t] - mean) * (series[t + lag] - mean);
    acf[lag] = sum / variance;
  }
  return acf;
}

bool recurrence_detect(const Trajectory& trajectory, const PrismaticAnalysis& analysis,
                       const RecurrenceOptions& options) {
  if (analysis.dof == 0 || options.min_period_count < 1) return false;
  const auto& samples = trajectory.samples();
  const std::size_t n = samples.size();
  std::vector<double> projected;
  projected.reserve(n);
  const Eigen::Vector3d pc1 = analysis.components.col(0);
  for (const auto& s : samples) projected.push_back((s.position - analysis.mean).dot(pc1));

  const std::size_t max_lag = n / static_cast<std::size_t>(options.min_period_count);
  if (max_lag < 2) return false;
  const auto acf = autocorrelation(projected, std::min(max_lag + 1, n - 1));
  const std::size_t last = std::min(max_lag, acf.size() - 2);

  // Skip the central lobe: peaks only count after the first trough.
  std::size_t lag = 1;
  while (lag <= last && !(acf[lag] < acf[lag - 1] && acf[lag] <= acf[lag + 1])) ++lag;
  double best = -1.0;
  for (++lag; lag <= last; ++lag) {
    if (acf[lag] >= acf[lag - 1] && acf[lag] > acf[lag + 1]) best = std::max(best, acf[lag]);
  }
  return best >= options.autocorr_threshold;
}

TrajectoryReport derive_trajectory_substring(const Trajectory& trajectory, const AnalysisOptions& options) {
  TrajectoryReport report;
  report.prismatic = prismatic_analysis(trajectory, options.prismatic);
  report.revolute = revolute_analysis(trajectory, options.rotation_threshold);
  report.attributes.recurrent = recurrence_detect(trajectory, report.prismatic, options.recurrence);
  report.attributes.prismatic_dof = report.prismatic.dof;
  report.attributes.revolute_dof = report.revolute.dof;
  report.substring = format_trajectory(report.attributes);
  return report;
}

std::string report_json(const TrajectoryReport& report, int indent) {
  const auto& p = report.prismatic;
  const auto& r = report.revolute;
  nlohmann::json components = nlohmann::json::array();
  for (int k = 0; k < 3; ++k) components.push_back(vec_json(p.components.col(k)));
  nlohmann::json alignment = nlohmann::json::array();
  for (const auto& h : p.alignment) alignment.push_back(histogram_json(h));
  nlohmann::json similarity = nlohmann::json::array();
  for (const auto& h : r.axis_similarity) similarity.push_back(histogram_json(h));
  std::size_t defined = 0;
  for (const auto& s : r.steps) defined += s.defined ? 1 : 0;

  nlohmann::json j = {
      {"prismatic",
       {{"variance_ratios", vec_json(p.variance_ratios)},
        {"components", components},
        {"total_std", p.total_std},
        {"dof", p.dof},
        {"velocity_alignment_histograms", alignment}}},
      {"revolute",
       {{"steps", r.steps.size()},
        {"defined_steps", defined},
        {"cumulative_rotation_deg", vec_json(r.cumulative_rotation * (180.0 / std::numbers::pi))},
        {"axis_similarity_histograms", similarity},
        {"dof", r.dof}}},
      {"recurrent", report.attributes.recurrent},
      {"substring", report.substring},
  };
  return j.dump(indent);
}

}  // namespace mcode
