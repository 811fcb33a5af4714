#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "opquant/construction.hpp"
#include "opquant/quantities.hpp"

using namespace opquant;

namespace {

const SpaceConfig l2{Exponent::two};

TailVector sample_vector(std::mt19937_64& rng, std::size_t prefix, double ratio) {
  std::normal_distribution<double> g;
  std::vector<double> head(prefix);
  for (auto& x : head) x = g(rng);
  return TailVector(std::move(head), {g(rng), g(rng)}, ratio);
}

void BM_InnerProduct(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const TailVector u = sample_vector(rng, n, 0.7);
  const TailVector v = sample_vector(rng, n / 2, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(inner_product(u, v));
}
BENCHMARK(BM_InnerProduct)->Arg(8)->Arg(64)->Arg(512);

void BM_RestrictedNorm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::vector<TailVector> basis;
  for (std::size_t i = 0; i < dim; ++i) basis.push_back(sample_vector(rng, 4 + i, 0.5));
  const Subspace M(std::move(basis));
  const Operator T = Operator::shift({0.5, 3.0}, {1.0, 2.0});
  for (auto _ : state) benchmark::DoNotOptimize(restricted_norm(T, M));
}
BENCHMARK(BM_RestrictedNorm)->Arg(2)->Arg(4)->Arg(8);

void BM_GrassmannSearch(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(6, 6);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
  const Operator T = Operator::dense(A);
  const auto restarts = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grassmann_search(Objective::min_restricted_norm, T, 6, 2, restarts, 7));
  }
}
BENCHMARK(BM_GrassmannSearch)->Arg(8)->Arg(64);

void BM_BuildCoreApproximants(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::vector<TailVector> basis;
  for (std::size_t i = 0; i < dim; ++i) basis.push_back(sample_vector(rng, 2 + i, 0.6));
  const BiorthogonalSystem sys = build_biorthogonal(Subspace(std::move(basis)), dim, l2, 5);
  const Operator T = Operator::diagonal({}, {1.0, 2.0});
  for (auto _ : state) benchmark::DoNotOptimize(build_core_approximants(sys, T, 0.05, 1.0));
}
BENCHMARK(BM_BuildCoreApproximants)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
