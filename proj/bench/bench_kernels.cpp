// Serial reference vs OpenMP kernels on registry-sized and larger inputs.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mcode/embedding.hpp"
#include "mcode/kernels.hpp"
#include "mcode/registry.hpp"

using namespace mcode;
using kernels::RowMatrix;

namespace {

std::vector<MotionCode> random_codes(std::size_t n) {
  const auto table = builtin_registry();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
  std::vector<MotionCode> codes(n);
  for (auto& c : codes) c = table[pick(rng)].code;
  return codes;
}

RowMatrix squared_distances(std::size_t n) {
  const auto codes = random_codes(n);
  Eigen::MatrixXd d;
  kernels::serial::code_distances(codes, Metric::weighted(WeightConfig::contact_priority()), d);
  // Break ties so the bisection has work to do.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> jitter(0.0, 0.1);
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) d(i, j) = d(j, i) = d(i, j) + jitter(rng);
  return d.array().square().matrix();
}

RowMatrix layout(std::size_t n) {
  RowMatrix y = initial_layout(n, 3, 1.0);
  return y;
}

RowMatrix joint(std::size_t n) {
  const auto c = kernels::serial::conditional_affinities(squared_distances(n), 12.0);
  RowMatrix p = c.p + c.p.transpose();
  p /= p.sum();
  return p;
}

template <bool Parallel>
void code_distances(benchmark::State& state) {
  const auto codes = random_codes(static_cast<std::size_t>(state.range(0)));
  const Metric metric = Metric::weighted(WeightConfig::contact_priority());
  Eigen::MatrixXd out;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::code_distances(codes, metric, out);
    else kernels::serial::code_distances(codes, metric, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void affinities(benchmark::State& state) {
  const RowMatrix d2 = squared_distances(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto c = Parallel ? kernels::parallel::conditional_affinities(d2, 12.0)
                      : kernels::serial::conditional_affinities(d2, 12.0);
    benchmark::DoNotOptimize(c.p.data());
  }
}

template <bool Parallel>
void gradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RowMatrix p = joint(n);
  const RowMatrix y = layout(n);
  RowMatrix grad(static_cast<Eigen::Index>(n), 2);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::tsne_gradient(p, y, 1.0, grad);
    else kernels::serial::tsne_gradient(p, y, 1.0, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

template <bool Parallel>
void kl(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RowMatrix p = joint(n);
  const RowMatrix y = layout(n);
  for (auto _ : state) {
    double v = Parallel ? kernels::parallel::kl_divergence(p, y) : kernels::serial::kl_divergence(p, y);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void covariance(benchmark::State& state) {
  const auto d = state.range(0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(200, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd out;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::covariance(centered, out);
    else kernels::serial::covariance(centered, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(code_distances<false>)->Arg(68)->Arg(1000);
BENCHMARK(code_distances<true>)->Arg(68)->Arg(1000);
BENCHMARK(affinities<false>)->Arg(68)->Arg(1000);
BENCHMARK(affinities<true>)->Arg(68)->Arg(1000);
BENCHMARK(gradient<false>)->Arg(68)->Arg(1000);
BENCHMARK(gradient<true>)->Arg(68)->Arg(1000);
BENCHMARK(kl<false>)->Arg(68)->Arg(1000);
BENCHMARK(kl<true>)->Arg(68)->Arg(1000);
BENCHMARK(covariance<false>)->Arg(50)->Arg(300);
BENCHMARK(covariance<true>)->Arg(50)->Arg(300);

BENCHMARK_MAIN();
