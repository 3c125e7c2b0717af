#include <benchmark/benchmark.h>

#include <random>

#include "ncsg/linalg.hpp"

namespace {

ncsg::ComplexMatrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ncsg::ComplexMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = {gauss(rng), gauss(rng)};
  return ncsg::ComplexMatrix(0.5 * (A + A.adjoint()));
}

void BM_HermitianEigs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto H = random_hermitian(n, 7);
  for (auto _ : state) {
    auto e = ncsg::hermitian_eigs(H);
    benchmark::DoNotOptimize(e.eigenvalues);
  }
}
BENCHMARK(BM_HermitianEigs)->Arg(32)->Arg(128)->Arg(512);

void BM_SingularValues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto M = random_hermitian(n, 8);
  for (auto _ : state) {
    auto s = ncsg::singular_values(M);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SingularValues)->Arg(32)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
