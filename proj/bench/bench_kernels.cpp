#include <benchmark/benchmark.h>

#include <random>

#include "willis/solver.hpp"

using namespace willis;

namespace {

MaterialSpec bench_spec(bool varying) {
  std::array<Expr, 10> p;
  for (int i = 0; i < 10; ++i)
    p[i] = (varying ? Expr::parse("1 + 0.1*sin(2*pi*x)") : Expr(1.0)) * (0.02 * (i + 1));
  if (!varying) return MaterialSpec::isotropic(1.0, 0.5, 1.0, MaterialSpec::coupling_totally_symmetric(p));
  return MaterialSpec::isotropic(Expr::parse("1 + 0.1*sin(2*pi*y)"), Expr::parse("0.5 + 0.05*cos(2*pi*z)"), 1.0,
                                 MaterialSpec::coupling_totally_symmetric(p));
}

void run_kernel(benchmark::State& state, KernelKind kind) {
  const int n = static_cast<int>(state.range(0));
  const bool varying = state.range(1) != 0;
  Grid g = Grid::cube(0, 1, n, BoundaryMode::periodic);
  MaterialSpec spec = bench_spec(varying);
  BoundaryLift lift;
  WillisOperator op(g, spec, lift, SchemeConfig{});
  Field v(g, 15), dv(g, 15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& x : v.raw()) x = u(rng);
  op.apply(kind, v, 0.0, dv);  // builds the coefficient cache
  for (auto _ : state) {
    op.apply(kind, v, 0.0, dv);
    benchmark::DoNotOptimize(dv.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

void BM_ApplyParallel(benchmark::State& s) { run_kernel(s, KernelKind::parallel); }
void BM_ApplyReference(benchmark::State& s) { run_kernel(s, KernelKind::reference); }

}  // namespace

BENCHMARK(BM_ApplyParallel)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyReference)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
