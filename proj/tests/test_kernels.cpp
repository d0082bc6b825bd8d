#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mcode/embedding.hpp"
#include "mcode/kernels.hpp"
#include "mcode/registry.hpp"
#include "oracles.hpp"

using namespace mcode;
using kernels::RowMatrix;

namespace {

RowMatrix random_layout(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix y(n, 2);
  for (int i = 0; i < n; ++i) {
    y(i, 0) = normal(rng);
    y(i, 1) = normal(rng);
  }
  return y;
}

RowMatrix table_squared_distances() {
  const auto m = distance_matrix(builtin_registry(), Metric::weighted(WeightConfig::contact_priority()));
  return m.values.array().square().matrix();
}

}  // namespace

TEST_CASE("code distances: serial and parallel agree exactly") {
  std::vector<MotionCode> codes;
  for (const auto& e : builtin_registry().entries()) codes.push_back(e.code);
  for (const Metric& metric : {Metric::hamming(), Metric::weighted(WeightConfig::trajectory_priority())}) {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    kernels::serial::code_distances(codes, metric, a);
    kernels::parallel::code_distances(codes, metric, b);
    CHECK(a == b);
  }
}

TEST_CASE("conditional affinities: serial and parallel agree exactly") {
  const RowMatrix d2 = table_squared_distances();
  const auto a = kernels::serial::conditional_affinities(d2, 12.0);
  const auto b = kernels::parallel::conditional_affinities(d2, 12.0);
  CHECK(a.p == b.p);
  CHECK(a.beta == b.beta);
  CHECK(a.entropy == b.entropy);
}

TEST_CASE("conditional affinities match the perplexity") {
  const RowMatrix d2 = table_squared_distances();
  const double perplexity = 12.0;
  const auto c = kernels::serial::conditional_affinities(d2, perplexity);
  for (Eigen::Index i = 0; i < d2.rows(); ++i) {
    CHECK(c.p(i, i) == 0.0);
    CHECK(c.p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    // Recompute the entropy from the returned row.
    double h = 0.0;
    for (Eigen::Index j = 0; j < d2.cols(); ++j) {
      if (c.p(i, j) > 0.0) h -= c.p(i, j) * std::log(c.p(i, j));
    }
    CHECK(h == doctest::Approx(c.entropy[i]).epsilon(1e-9));
    // Rows with more than `perplexity` neighbours tied at the smallest
    // distance cannot go below log(ties); the search runs to that floor.
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d2.cols(); ++j)
      if (j != i) nearest = std::min(nearest, d2(i, j));
    int ties = 0;
    for (Eigen::Index j = 0; j < d2.cols(); ++j) ties += j != i && d2(i, j) == nearest;
    if (std::log(ties) > std::log(perplexity)) {
      CHECK(h == doctest::Approx(std::log(ties)).epsilon(1e-9));
    } else {
      CHECK(std::abs(h - std::log(perplexity)) <= kernels::kEntropyTolerance);
    }
  }
}

TEST_CASE("gradient and KL: serial and parallel agree exactly") {
  const auto p = joint_affinities(
      distance_matrix(builtin_registry(), Metric::weighted(WeightConfig::contact_priority())), 12.0);
  const RowMatrix prow = p;
  const RowMatrix y = random_layout(static_cast<int>(p.rows()), 5);
  for (double exaggeration : {1.0, 36.0}) {
    RowMatrix ga(p.rows(), 2);
    RowMatrix gb(p.rows(), 2);
    kernels::serial::tsne_gradient(prow, y, exaggeration, ga);
    kernels::parallel::tsne_gradient(prow, y, exaggeration, gb);
    CHECK(ga == gb);
  }
  CHECK(kernels::serial::kl_divergence(prow, y) == kernels::parallel::kl_divergence(prow, y));
}

TEST_CASE("gradient matches finite differences of KL") {
  const auto p = joint_affinities(
      distance_matrix(builtin_registry(), Metric::weighted(WeightConfig::trajectory_priority())), 12.0);
  const RowMatrix prow = p;
  RowMatrix y = random_layout(static_cast<int>(p.rows()), 17);
  RowMatrix grad(p.rows(), 2);
  kernels::serial::tsne_gradient(prow, y, 1.0, grad);
  const double h = 1e-6;
  for (int i : {0, 7, 30}) {
    for (int k = 0; k < 2; ++k) {
      RowMatrix plus = y;
      RowMatrix minus = y;
      plus(i, k) += h;
      minus(i, k) -= h;
      const double numeric = (kernels::serial::kl_divergence(prow, plus) -
                              kernels::serial::kl_divergence(prow, minus)) / (2.0 * h);
      CHECK(grad(i, k) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("covariance: kernels agree with each other and with the oracle") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 40;
  const int d = 7;
  Eigen::MatrixXd x(n, d);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) rows[i][k] = x(i, k) = normal(rng);
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();

  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  kernels::serial::covariance(centered, a);
  kernels::parallel::covariance(centered, b);
  CHECK(a == b);

  const auto expected = oracle::covariance(rows);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) CHECK(a(r, c) == doctest::Approx(expected[r][c]).epsilon(1e-12));
}
