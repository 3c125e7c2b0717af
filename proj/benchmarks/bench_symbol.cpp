#include <benchmark/benchmark.h>

#include "ncsg/spectral.hpp"
#include "ncsg/symbol.hpp"

namespace {

ncsg::Symbol toeplitz_symbol(const ncsg::Space& s) {
  ncsg::SymbolSpec spec;
  spec.family = ncsg::SymbolSpec::Family::multiplication;
  spec.expr = "2+cos(x1)";
  return ncsg::build_symbol(spec, s, s.lambda());
}

void BM_AssembleSection(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::torus(1, m), m / 4.0);
  const auto sigma = toeplitz_symbol(s);
  for (auto _ : state) {
    auto om = ncsg::assemble_operator_matrix(s, sigma, s.lambda());
    benchmark::DoNotOptimize(om.matrix);
  }
}
BENCHMARK(BM_AssembleSection)->Arg(128)->Arg(512)->Arg(2048);

void BM_QuantizeApply(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::torus(1, m), m / 4.0);
  const auto sigma = toeplitz_symbol(s);
  ncsg::ScalarField f;
  f.values.assign(s.n_points(), ncsg::Complex(1.0, 0.0));
  f.band_degree = 0;
  for (auto _ : state) {
    auto g = ncsg::quantize_apply(s, sigma, f);
    benchmark::DoNotOptimize(g.values);
  }
}
BENCHMARK(BM_QuantizeApply)->Arg(256)->Arg(1024);

void BM_ShellProfile(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::su2(m, m, m), (m - 2) / 4.0);
  ncsg::SymbolSpec spec;
  spec.family = ncsg::SymbolSpec::Family::scalar_expr;
  spec.expr = "(2+re_a)/xi_weight";
  const auto sigma = ncsg::build_symbol(spec, s, s.lambda());
  for (auto _ : state) {
    auto prof = ncsg::shell_profile(s, sigma);
    benchmark::DoNotOptimize(prof.entries);
  }
}
BENCHMARK(BM_ShellProfile)->Arg(12)->Arg(16);

void BM_GohbergSections(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ncsg::Space s(ncsg::GroupDescriptor::torus(1, m), m / 4.0);
  const auto sigma = toeplitz_symbol(s);
  const double lam = s.lambda();
  for (auto _ : state) {
    auto rep = ncsg::gohberg_check(s, sigma, {lam / 4.0, lam / 2.0, lam}, 5,
                                   {lam / 4.0, lam / 2.0, lam}, ncsg::WitnessProfile{},
                                   {});
    benchmark::DoNotOptimize(rep.s_k1);
  }
}
BENCHMARK(BM_GohbergSections)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
