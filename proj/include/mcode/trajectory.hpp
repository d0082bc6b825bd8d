#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mcode/codec.hpp"

namespace mcode {

struct PoseSample {
  double t = 0.0;                                    // seconds
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // meters
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

inline constexpr double kQuaternionNormTolerance = 1e-3;
inline constexpr double kToolAxesTolerance = 1e-9;

// Validated, immutable pose sequence. Quaternions must be within 1e-3 of unit
// norm and are renormalized; time stamps must strictly increase. Tool axes are
// the columns of an orthonormal matrix (defaults to the world axes).
class Trajectory {
 public:
  explicit Trajectory(std::vector<PoseSample> samples,
                      const Eigen::Matrix3d& tool_axes = Eigen::Matrix3d::Identity());

  const std::vector<PoseSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const Eigen::Matrix3d& tool_axes() const noexcept { return tool_axes_; }

 private:
  std::vector<PoseSample> samples_;
  Eigen::Matrix3d tool_axes_;
};

// CSV with header "t,x,y,z,qw,qx,qy,qz". An optional comment line
// "# tool_axes: ax ay az; bx by bz; cx cy cz" overrides the tool frame.
Trajectory read_trajectory(std::istream& in);
Trajectory load_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& out, const Trajectory& trajectory);

// 18 bins of 10 degrees over [0, 180].
struct AngleHistogram {
  static constexpr std::size_t kBins = 18;
  std::array<std::size_t, kBins> counts{};

  void add(double degrees);
  std::size_t total() const;
  std::size_t peak_bin() const;
  static double edge(std::size_t i) { return 180.0 * static_cast<double>(i) / kBins; }
};

struct PrismaticOptions {
  double variance_threshold = 0.90;
  double motion_floor = 1e-3;  // meters of total position standard deviation
};

struct PrismaticAnalysis {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();      // descending
  Eigen::Matrix3d components = Eigen::Matrix3d::Identity();  // column k is PC k
  Eigen::Vector3d variance_ratios = Eigen::Vector3d::Zero();
  double total_std = 0.0;
  int dof = 0;
  // Angle between each finite-difference velocity and PC k.
  std::array<AngleHistogram, 3> alignment;
};

// Requires at least 3 samples.
PrismaticAnalysis prismatic_analysis(const Trajectory& trajectory, const PrismaticOptions& options = {});

struct AxisAngle {
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();  // unit when defined
  double angle = 0.0;                              // [0, pi]
  bool defined = false;                            // false when angle < kMinStepAngle
};

inline constexpr double kMinStepAngle = 1e-6;

// Angle from the trace, axis from the skew part; close to pi the axis comes
// from the quaternion of R instead.
AxisAngle axis_angle_from_rotation(const Eigen::Matrix3d& rotation);
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis, double angle);

struct RevoluteAnalysis {
  std::vector<AxisAngle> steps;  // one per consecutive pair
  // Angle between each defined step axis and tool axis k.
  std::array<AngleHistogram, 3> axis_similarity;
  // Signed radians about each tool axis, summed over steps.
  Eigen::Vector3d cumulative_rotation = Eigen::Vector3d::Zero();
  int dof = 0;
};

inline constexpr double kDefaultRotationThreshold = 30.0 * 3.14159265358979323846 / 180.0;

// Requires at least 2 samples. Each step uses R_t^T * R_{t+1}.
RevoluteAnalysis revolute_analysis(const Trajectory& trajectory,
                                   double rotation_threshold = kDefaultRotationThreshold);

struct RecurrenceOptions {
  int min_period_count = 2;
  double autocorr_threshold = 0.5;
};

// Biased, variance-normalized autocorrelation for lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

// Positions projected on PC1; recurrent when the autocorrelation has a
// non-zero-lag peak above the threshold that repeats at least
// min_period_count times within the recording.
bool recurrence_detect(const Trajectory& trajectory, const PrismaticAnalysis& analysis,
                       const RecurrenceOptions& options = {});

using TrajectoryAttributes = TrajectoryDescriptor;

struct AnalysisOptions {
  PrismaticOptions prismatic;
  double rotation_threshold = kDefaultRotationThreshold;
  RecurrenceOptions recurrence;
};

struct TrajectoryReport {
  PrismaticAnalysis prismatic;
  RevoluteAnalysis revolute;
  TrajectoryAttributes attributes;
  std::string substring;  // 5 bits: [recurrent][prismatic x2][revolute x2]
};

TrajectoryReport derive_trajectory_substring(const Trajectory& trajectory,
                                             const AnalysisOptions& options = {});

// JSON report: variance ratios, histograms (edges + counts), cumulative
// rotations in degrees, derived substring.
std::string report_json(const TrajectoryReport& report, int indent = 2);

}  // namespace mcode
