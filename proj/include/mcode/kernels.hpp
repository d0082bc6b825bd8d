#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// version; both evaluate every floating-point expression in the same order,
// so their outputs are bit-identical. Tests compare the two directly.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mcode/codec.hpp"
#include "mcode/metrics.hpp"

namespace mcode::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-point Gaussian bandwidths found by bisection on the precision.
struct ConditionalAffinities {
  RowMatrix p;                 // row i holds p(j|i), rows sum to 1
  std::vector<double> beta;    // precision 1 / (2 sigma^2) per point
  std::vector<double> entropy; // achieved Shannon entropy (nats) per point
};

inline constexpr double kEntropyTolerance = 1e-5;
inline constexpr int kMaxBisectionSteps = 200;

namespace serial {

void code_distances(std::span<const MotionCode> codes, const Metric& metric, Eigen::MatrixXd& out);

// squared_distances must be n x n with a zero diagonal.
ConditionalAffinities conditional_affinities(const RowMatrix& squared_distances, double perplexity);

// Gradient of KL(P || Q) for a 2-D layout under the Student-t kernel, with
// P scaled by `exaggeration`. Writes n x 2 into grad.
void tsne_gradient(const RowMatrix& p, const RowMatrix& y, double exaggeration, RowMatrix& grad);

// KL(P || Q) for the layout y (P taken as given, no exaggeration).
double kl_divergence(const RowMatrix& p, const RowMatrix& y);

// Sample covariance (divides by n - 1) of the rows of an already centered
// n x d matrix.
void covariance(const Eigen::MatrixXd& centered, Eigen::MatrixXd& out);

}  // namespace serial

namespace parallel {

void code_distances(std::span<const MotionCode> codes, const Metric& metric, Eigen::MatrixXd& out);
ConditionalAffinities conditional_affinities(const RowMatrix& squared_distances, double perplexity);
void tsne_gradient(const RowMatrix& p, const RowMatrix& y, double exaggeration, RowMatrix& grad);
double kl_divergence(const RowMatrix& p, const RowMatrix& y);
void covariance(const Eigen::MatrixXd& centered, Eigen::MatrixXd& out);

}  // namespace parallel

}  // namespace mcode::kernels
