#include "mcode/kernels.hpp"

#include <cmath>
#include <limits>

namespace mcode::kernels {
namespace {

// Row-level bodies shared by the serial and OpenMP loops, so both paths run
// the same arithmetic in the same order.

void distance_row(std::span<const MotionCode> codes, const Metric& metric, Eigen::MatrixXd& out,
                  Eigen::Index i) {
  const auto n = static_cast<Eigen::Index>(codes.size());
  out(i, i) = 0.0;
  for (Eigen::Index j = i + 1; j < n; ++j) {
    const double d = metric(codes[i], codes[j]);
    out(i, j) = d;
    out(j, i) = d;
  }
}

void affinity_row(const RowMatrix& sq, double target_entropy, Eigen::Index i,
                  ConditionalAffinities& result) {
  const Eigen::Index n = sq.rows();
  double shift = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != i) shift = std::min(shift, sq(i, j));
  }

  double beta = 1.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double entropy = 0.0;
  auto row = result.p.row(i);

  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    double sum = 0.0;
    double weighted = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) {
        row(j) = 0.0;
        continue;
      }
      const double excess = sq(i, j) - shift;
      const double v = std::exp(-beta * excess);
      row(j) = v;
      sum += v;
      weighted += excess * v;
    }
    entropy = std::log(sum) + beta * weighted / sum;
    for (Eigen::Index j = 0; j < n; ++j) row(j) /= sum;

    const double gap = entropy - target_entropy;
    if (std::abs(gap) < kEntropyTolerance) break;
    if (gap > 0.0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = std::isinf(lo) ? beta * 0.5 : 0.5 * (beta + lo);
    }
  }
  result.beta[i] = beta;
  result.entropy[i] = entropy;
}

void kernel_row(const RowMatrix& y, RowMatrix& num, std::vector<double>& row_sums, Eigen::Index i) {
  const Eigen::Index n = y.rows();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) {
      num(i, j) = 0.0;
      continue;
    }
    const double dx = y(i, 0) - y(j, 0);
    const double dy = y(i, 1) - y(j, 1);
    const double v = 1.0 / (1.0 + dx * dx + dy * dy);
    num(i, j) = v;
    sum += v;
  }
  row_sums[i] = sum;
}

double total(const std::vector<double>& parts) {
  double z = 0.0;
  for (double v : parts) z += v;
  return z;
}

void gradient_row(const RowMatrix& p, const RowMatrix& y, const RowMatrix& num, double z,
                  double exaggeration, RowMatrix& grad, Eigen::Index i) {
  const Eigen::Index n = y.rows();
  double gx = 0.0;
  double gy = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    const double force = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
    gx += force * (y(i, 0) - y(j, 0));
    gy += force * (y(i, 1) - y(j, 1));
  }
  grad(i, 0) = 4.0 * gx;
  grad(i, 1) = 4.0 * gy;
}

double kl_row(const RowMatrix& p, const RowMatrix& num, double z, Eigen::Index i) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double pij = p(i, j);
    if (j == i || pij <= 0.0) continue;
    const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
    sum += pij * std::log(pij / q);
  }
  return sum;
}

void covariance_row(const Eigen::MatrixXd& c, Eigen::MatrixXd& out, Eigen::Index a) {
  const double scale = 1.0 / static_cast<double>(c.rows() - 1);
  for (Eigen::Index b = a; b < c.cols(); ++b) {
    const double v = c.col(a).dot(c.col(b)) * scale;
    out(a, b) = v;
    out(b, a) = v;
  }
}

ConditionalAffinities make_affinities(Eigen::Index n) {
  ConditionalAffinities result;
  result.p = RowMatrix::Zero(n, n);
  result.beta.assign(static_cast<std::size_t>(n), 0.0);
  result.entropy.assign(static_cast<std::size_t>(n), 0.0);
  return result;
}

}  // namespace

namespace serial {

void code_distances(std::span<const MotionCode> codes, const Metric& metric, Eigen::MatrixXd& out) {
  const auto n = static_cast<Eigen::Index>(codes.size());
  out.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) distance_row(codes, metric, out, i);
}

ConditionalAffinities conditional_affinities(const RowMatrix& squared_distances, double perplexity) {
  const Eigen::Index n = squared_distances.rows();
  auto result = make_affinities(n);
  const double target = std::log(perplexity);
  for (Eigen::Index i = 0; i < n; ++i) affinity_row(squared_distances, target, i, result);
  return result;
}

void tsne_gradient(const RowMatrix& p, const RowMatrix& y, double exaggeration, RowMatrix& grad) {
  const Eigen::Index n = y.rows();
  RowMatrix num(n, n);
  std::vector<double> row_sums(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) kernel_row(y, num, row_sums, i);
  const double z = total(row_sums);
  grad.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) gradient_row(p, y, num, z, exaggeration, grad, i);
}

double kl_divergence(const RowMatrix& p, const RowMatrix& y) {
  const Eigen::Index n = y.rows();
  RowMatrix num(n, n);
  std::vector<double> row_sums(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) kernel_row(y, num, row_sums, i);
  const double z = total(row_sums);
  std::vector<double> parts(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) parts[i] = kl_row(p, num, z, i);
  return total(parts);
}

void covariance(const Eigen::MatrixXd& centered, Eigen::MatrixXd& out) {
  const Eigen::Index d = centered.cols();
  out.resize(d, d);
  for (Eigen::Index a = 0; a < d; ++a) covariance_row(centered, out, a);
}

}  // namespace serial

namespace parallel {

void code_distances(std::span<const MotionCode> codes, const Metric& metric, Eigen::MatrixXd& out) {
  const auto n = static_cast<Eigen::Index>(codes.size());
  out.resize(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) distance_row(codes, metric, out, i);
}

ConditionalAffinities conditional_affinities(const RowMatrix& squared_distances, double perplexity) {
  const Eigen::Index n = squared_distances.rows();
  auto result = make_affinities(n);
  const double target = std::log(perplexity);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i) affinity_row(squared_distances, target, i, result);
  return result;
}

void tsne_gradient(const RowMatrix& p, const RowMatrix& y, double exaggeration, RowMatrix& grad) {
  const Eigen::Index n = y.rows();
  RowMatrix num(n, n);
  std::vector<double> row_sums(static_cast<std::size_t>(n));
  grad.resize(n, 2);
  double z = 0.0;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) kernel_row(y, num, row_sums, i);
#pragma omp single
    z = total(row_sums);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) gradient_row(p, y, num, z, exaggeration, grad, i);
  }
}

double kl_divergence(const RowMatrix& p, const RowMatrix& y) {
  const Eigen::Index n = y.rows();
  RowMatrix num(n, n);
  std::vector<double> row_sums(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) kernel_row(y, num, row_sums, i);
  const double z = total(row_sums);
  std::vector<double> parts(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) parts[i] = kl_row(p, num, z, i);
  return total(parts);
}

void covariance(const Eigen::MatrixXd& centered, Eigen::MatrixXd& out) {
  const Eigen::Index d = centered.cols();
  out.resize(d, d);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index a = 0; a < d; ++a) covariance_row(centered, out, a);
}

}  // namespace parallel

}  // namespace mcode::kernels
