#include <benchmark/benchmark.h>

#include <random>

#include "ncsg/fourier.hpp"
#include "ncsg/group.hpp"

namespace {

ncsg::ScalarField random_field(const ncsg::Space& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ncsg::ScalarField f;
  f.values.resize(s.n_points());
  for (auto& v : f.values) v = {gauss(rng), gauss(rng)};
  return f;
}

void BM_TorusAnalyze(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::torus(1, m), m / 4.0);
  const auto f = random_field(s, 3);
  for (auto _ : state) {
    auto c = ncsg::analyze(s, f);
    benchmark::DoNotOptimize(c.coeff);
  }
}
BENCHMARK(BM_TorusAnalyze)->Arg(64)->Arg(256)->Arg(1024);

void BM_TorusSynthesize(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::torus(1, m), m / 4.0);
  const auto c = ncsg::analyze(s, random_field(s, 4));
  for (auto _ : state) {
    auto f = ncsg::synthesize(s, c);
    benchmark::DoNotOptimize(f.values);
  }
}
BENCHMARK(BM_TorusSynthesize)->Arg(64)->Arg(256)->Arg(1024);

void BM_Su2Analyze(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::su2(m, m, m), (m - 2) / 4.0);
  const auto f = random_field(s, 5);
  for (auto _ : state) {
    auto c = ncsg::analyze(s, f);
    benchmark::DoNotOptimize(c.coeff);
  }
}
BENCHMARK(BM_Su2Analyze)->Arg(12)->Arg(16)->Arg(24);

void BM_Su2AnalyzeBatch(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::su2(m, m, m), (m - 2) / 4.0);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ncsg::ComplexMatrix fields(s.n_points(), 32);
  for (Eigen::Index i = 0; i < fields.rows(); ++i)
    for (Eigen::Index j = 0; j < fields.cols(); ++j)
      fields(i, j) = {gauss(rng), gauss(rng)};
  for (auto _ : state) {
    auto c = ncsg::analyze_batch(s, fields);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Su2AnalyzeBatch)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
