#include "doctest.h"

#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mcode/error.hpp"
#include "mcode/trajectory.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace mcode;

namespace {

// Covariance eigenvalue ratios of the helix (400 samples, u in [0, 4 pi]),
// computed once by a standalone Jacobi solver in double precision.
constexpr double kHelixRatios[3] = {0.5943459394574401, 0.22884886425164555, 0.17680519629091448};
constexpr int kHelixDof = 3;

constexpr double kDeg = synthetic::kPi / 180.0;

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  return q.normalized().toRotationMatrix();
}

Trajectory transformed(const Trajectory& t, const Eigen::Matrix3d& r, const Eigen::Vector3d& shift) {
  std::vector<PoseSample> samples = t.samples();
  for (auto& s : samples) s.position = r * s.position + shift;
  return Trajectory(std::move(samples), t.tool_axes());
}

Trajectory reversed(const Trajectory& t) {
  std::vector<PoseSample> samples(t.samples().rbegin(), t.samples().rend());
  const double end = t.samples().back().t;
  for (auto& s : samples) s.t = end - s.t;
  return Trajectory(std::move(samples), t.tool_axes());
}

Trajectory from_csv(const std::string& text) {
  std::istringstream in(text);
  return read_trajectory(in);
}

}  // namespace

TEST_CASE("line has one prismatic degree of freedom") {
  const auto a = prismatic_analysis(synthetic::line({0, 0, 0}, {0.3, -0.2, 0.1}));
  CHECK(a.dof == 1);
  CHECK(a.variance_ratios[0] == doctest::Approx(1.0).epsilon(1e-12));
  // Velocities are parallel to PC1.
  const auto& h = a.alignment[0];
  CHECK(h.counts[0] + h.counts[AngleHistogram::kBins - 1] == h.total());
}

TEST_CASE("planar circle has two") {
  const auto a = prismatic_analysis(synthetic::circle(0.1, 1));
  CHECK(a.dof == 2);
  CHECK(a.variance_ratios[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(a.variance_ratios[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(a.variance_ratios[2] < 1e-9);
  // Velocities lie in the plane: 90 degrees to the normal.
  CHECK(a.alignment[2].peak_bin() == 9);
  CHECK(a.alignment[2].counts[8] + a.alignment[2].counts[9] == a.alignment[2].total());
}

TEST_CASE("helix matches the independent eigendecomposition") {
  const auto traj = synthetic::helix();
  const auto a = prismatic_analysis(traj);
  CHECK(a.dof == kHelixDof);
  for (int k = 0; k < 3; ++k) CHECK(a.variance_ratios[k] == doctest::Approx(kHelixRatios[k]).epsilon(1e-9));

  // Same numbers from the test-side oracle.
  std::vector<std::vector<double>> rows;
  for (const auto& s : traj.samples()) rows.push_back({s.position.x(), s.position.y(), s.position.z()});
  const auto values = oracle::jacobi_eigenvalues(oracle::covariance(rows));
  const double total = values[0] + values[1] + values[2];
  for (int k = 0; k < 3; ++k) CHECK(values[k] / total == doctest::Approx(kHelixRatios[k]).epsilon(1e-9));
}

TEST_CASE("principal components are orthonormal and reconstruct the covariance") {
  const auto a = prismatic_analysis(synthetic::helix());
  const Eigen::Matrix3d& v = a.components;
  CHECK((v.transpose() * v - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  const Eigen::Matrix3d rebuilt = v * a.eigenvalues.asDiagonal() * v.transpose();
  CHECK((rebuilt - a.covariance).norm() < 1e-12);
  CHECK(a.eigenvalues[0] >= a.eigenvalues[1]);
  CHECK(a.eigenvalues[1] >= a.eigenvalues[2]);
  for (int k = 0; k < 3; ++k) {
    Eigen::Index arg = 0;
    v.col(k).cwiseAbs().maxCoeff(&arg);
    CHECK(v(arg, k) > 0.0);
  }
}

TEST_CASE("prismatic analysis is invariant to rigid motion") {
  std::mt19937_64 rng(21);
  const auto base = prismatic_analysis(synthetic::helix());
  for (int trial = 0; trial < 10; ++trial) {
    const auto moved = prismatic_analysis(transformed(synthetic::helix(), random_rotation(rng), {1.0, -2.0, 0.5}));
    CHECK(moved.dof == base.dof);
    for (int k = 0; k < 3; ++k) CHECK(moved.variance_ratios[k] == doctest::Approx(base.variance_ratios[k]).epsilon(1e-9));
  }
}

TEST_CASE("stationary and tiny motion have no prismatic freedom") {
  const auto still = prismatic_analysis(synthetic::stationary());
  CHECK(still.dof == 0);
  CHECK(still.total_std == 0.0);
  for (int k = 0; k < 3; ++k) CHECK(still.variance_ratios[k] == doctest::Approx(1.0 / 3.0));

  const auto jitter = prismatic_analysis(synthetic::line({0, 0, 0}, {1e-4, 0, 0}));
  CHECK(jitter.dof == 0);
  CHECK_THROWS_AS(prismatic_analysis(synthetic::line({0, 0, 0}, {1, 0, 0}, 2)), AnalysisError);
}

TEST_CASE("variance threshold") {
  PrismaticOptions strict;
  strict.variance_threshold = 0.6;
  CHECK(prismatic_analysis(synthetic::helix(), strict).dof == 2);
  strict.variance_threshold = 0.5;
  CHECK(prismatic_analysis(synthetic::helix(), strict).dof == 1);
}

TEST_CASE("120 degree rotation about the tool y axis") {
  const auto r = revolute_analysis(synthetic::rotation({0, 1, 0}, 120.0 * kDeg));
  CHECK(r.dof == 1);
  CHECK(r.cumulative_rotation[1] / kDeg == doctest::Approx(120.0).epsilon(0.1 / 120.0));
  CHECK(std::abs(r.cumulative_rotation[0]) < 1e-9);
  CHECK(std::abs(r.cumulative_rotation[2]) < 1e-9);
  for (const auto& step : r.steps) {
    REQUIRE(step.defined);
    CHECK(std::abs(step.axis.dot(Eigen::Vector3d::UnitY())) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(r.axis_similarity[1].counts[0] == r.steps.size());
}

TEST_CASE("rotation about an arbitrary axis recovers the axis") {
  const Eigen::Vector3d axis = Eigen::Vector3d(0.3, -0.5, 0.8).normalized();
  const auto r = revolute_analysis(synthetic::rotation(axis, 120.0 * kDeg));
  Eigen::Vector3d mean_axis = Eigen::Vector3d::Zero();
  for (const auto& s : r.steps) mean_axis += s.axis * s.angle;
  CHECK(std::acos(std::min(1.0, mean_axis.normalized().dot(axis))) / kDeg < 1.0);
  CHECK(r.cumulative_rotation.norm() / kDeg == doctest::Approx(120.0).epsilon(0.1 / 120.0));
}

TEST_CASE("rotation is measured in the tool frame") {
  // Tool y axis along world z.
  Eigen::Matrix3d tool;
  tool << 1, 0, 0,
          0, 0, -1,
          0, 1, 0;
  const auto r = revolute_analysis(synthetic::rotation({0, 0, 1}, 90.0 * kDeg, 91, tool));
  CHECK(r.dof == 1);
  CHECK(r.cumulative_rotation[1] / kDeg == doctest::Approx(90.0));
}

TEST_CASE("constant orientation has no revolute freedom") {
  const auto r = revolute_analysis(synthetic::stationary());
  CHECK(r.dof == 0);
  for (const auto& s : r.steps) {
    CHECK_FALSE(s.defined);
    CHECK(s.angle == 0.0);
  }
  CHECK(r.axis_similarity[0].total() == 0);
  CHECK(revolute_analysis(synthetic::rotation({1, 0, 0}, 20.0 * kDeg)).dof == 0);
}

TEST_CASE("time reversal negates rotation and keeps prismatic structure") {
  const auto forward = synthetic::rotation({1, 1, 0}, 100.0 * kDeg);
  const auto back = reversed(forward);
  const auto rf = revolute_analysis(forward);
  const auto rb = revolute_analysis(back);
  CHECK((rf.cumulative_rotation + rb.cumulative_rotation).norm() < 1e-9);
  CHECK(rf.dof == rb.dof);

  const auto pf = prismatic_analysis(synthetic::helix());
  const auto pb = prismatic_analysis(reversed(synthetic::helix()));
  CHECK((pf.variance_ratios - pb.variance_ratios).norm() < 1e-12);
}

TEST_CASE("axis-angle round trip over random rotations") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix3d r = random_rotation(rng);
    const AxisAngle aa = axis_angle_from_rotation(r);
    REQUIRE(aa.defined);
    REQUIRE((rotation_from_axis_angle(aa.axis, aa.angle) - r).norm() < 1e-6);
  }
}

TEST_CASE("axis-angle near the degenerate ends") {
  const Eigen::Vector3d axis = Eigen::Vector3d(1, 2, -2).normalized();
  for (double angle : {synthetic::kPi, synthetic::kPi - 1e-5, synthetic::kPi - 1e-3, 1e-4}) {
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const AxisAngle aa = axis_angle_from_rotation(r);
    REQUIRE(aa.defined);
    CHECK(aa.angle == doctest::Approx(angle).epsilon(1e-6));
    CHECK(std::abs(aa.axis.dot(axis)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((rotation_from_axis_angle(aa.axis, aa.angle) - r).norm() < 1e-6);
  }
  const AxisAngle tiny = axis_angle_from_rotation(Eigen::AngleAxisd(1e-8, axis).toRotationMatrix());
  CHECK_FALSE(tiny.defined);
}

TEST_CASE("recurrence") {
  const auto sine = synthetic::sinusoid(4);
  CHECK(recurrence_detect(sine, prismatic_analysis(sine)));
  CHECK(recurrence_detect(sine, prismatic_analysis(sine)) == recurrence_detect(sine, prismatic_analysis(sine)));

  const auto sweep = synthetic::line({0, 0, 0}, {0.5, 0, 0});
  CHECK_FALSE(recurrence_detect(sweep, prismatic_analysis(sweep)));

  const auto stir = synthetic::circle(0.08, 5);
  CHECK(recurrence_detect(stir, prismatic_analysis(stir)));

  const auto chop = synthetic::chop_stroke();
  CHECK_FALSE(recurrence_detect(chop, prismatic_analysis(chop)));

  const auto still = synthetic::stationary();
  CHECK_FALSE(recurrence_detect(still, prismatic_analysis(still)));

  // Three periods fit the default search window but not one sized for four.
  const auto three = synthetic::sinusoid(3);
  CHECK(recurrence_detect(three, prismatic_analysis(three)));
  RecurrenceOptions four;
  four.min_period_count = 4;
  CHECK_FALSE(recurrence_detect(three, prismatic_analysis(three), four));
}

TEST_CASE("autocorrelation") {
  const std::vector<double> alternating{1, -1, 1, -1, 1, -1};
  const auto r = autocorrelation(alternating, 3);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(-5.0 / 6.0));
  CHECK(r[2] == doctest::Approx(4.0 / 6.0));
  const std::vector<double> flat{2, 2, 2};
  CHECK(autocorrelation(flat, 2) == std::vector<double>{0, 0, 0});
}

TEST_CASE("derived trajectory substrings") {
  CHECK(derive_trajectory_substring(synthetic::chop_stroke()).substring == "00100");
  CHECK(derive_trajectory_substring(synthetic::circle(0.08, 5)).substring == "11000");
  CHECK(derive_trajectory_substring(synthetic::stationary()).substring == "00000");
  const auto turn = derive_trajectory_substring(synthetic::rotation({0, 1, 0}, 120.0 * kDeg));
  CHECK(turn.substring == "00001");
  CHECK(turn.attributes == TrajectoryAttributes{false, 0, 1});
}

TEST_CASE("json report") {
  const auto report = derive_trajectory_substring(synthetic::rotation({0, 1, 0}, 120.0 * kDeg));
  const auto j = nlohmann::json::parse(report_json(report));
  CHECK(j["substring"] == "00001");
  CHECK(j.dump() == nlohmann::json::parse(report_json(report)).dump());
}

TEST_CASE("trajectory files") {
  const std::string header = "t,x,y,z,qw,qx,qy,qz\n";
  const auto two = from_csv(header + "0,0,0,0,1,0,0,0\n0.1,0.01,0,0,1,0,0,0\n");
  CHECK(two.size() == 2);

  auto expect_line = [&](const std::string& body, std::size_t line) {
    try {
      from_csv(header + body);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_line("0,0,0,0,0,0,0,0\n", 2);
  expect_line("0,0,0,0,1,0,0,0\n0.2,0,0,0,1,0,0,0\n0.1,0,0,0,1,0,0,0\n", 4);
  expect_line("0,0,0,0,1,0,0\n", 2);
  expect_line("0,0,zero,0,1,0,0,0\n", 2);
  expect_line("0,0,0,0,1.01,0,0,0\n", 2);
  CHECK_THROWS_AS(from_csv("time,x\n"), ParseError);

  const auto tooled = from_csv("# tool_axes: 0 1 0; -1 0 0; 0 0 1\n" + header + "0,0,0,0,1,0,0,0\n1,0,0,0,1,0,0,0\n");
  CHECK(tooled.tool_axes().col(0) == Eigen::Vector3d(0, 1, 0));
  CHECK_THROWS_AS(from_csv("# tool_axes: 1 1 0; -1 0 0; 0 0 1\n" + header + "0,0,0,0,1,0,0,0\n"), ParseError);

  CHECK_THROWS_AS(load_trajectory("/nonexistent/path.csv"), IoError);
}

TEST_CASE("write then read reproduces the trajectory") {
  const auto original = synthetic::rotation({1, 2, 3}, 1.0, 30);
  std::ostringstream out;
  write_trajectory(out, original);
  const auto back = from_csv(out.str());
  REQUIRE(back.size() == original.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.samples()[i].t == original.samples()[i].t);
    CHECK(back.samples()[i].orientation.coeffs() == original.samples()[i].orientation.coeffs());
  }
}
