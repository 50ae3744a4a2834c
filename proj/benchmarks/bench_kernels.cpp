#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "hemo/assembly.hpp"
#include "hemo/bench.hpp"
#include "hemo/generators.hpp"
#include "hemo/krylov.hpp"
#include "hemo/precond.hpp"
#include "hemo/sparse.hpp"

namespace {

using namespace hemo;

Vector noise(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(n);
  for (auto& v : x) v = u(gen);
  return x;
}

struct PipeState {
  Mesh mesh = cylinder_mesh(2.0, 30.0, 4, 30);
  Assembler assembler{mesh, DofMap(mesh), FlowParams{}};
  FlowState y;
  FlowState ydot;

  PipeState() {
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    y = {10.0 * noise(3 * n, 1), noise(n, 2)};
    ydot = {noise(3 * n, 3), Vector::Zero(n)};
  }
};

void BM_Residual(benchmark::State& state) {
  const PipeState p;
  const std::vector<OutletLoad> loads(p.assembler.num_outlets());
  for (auto _ : state) benchmark::DoNotOptimize(p.assembler.residual(p.y, p.ydot, loads, 0.01, 0.0));
  state.SetLabel(std::to_string(p.mesh.num_tets()) + " tets");
}
BENCHMARK(BM_Residual)->Unit(benchmark::kMillisecond);

void BM_Tangent(benchmark::State& state) {
  const PipeState p;
  const std::vector<double> m(p.assembler.num_outlets(), 1333.0);
  for (auto _ : state) benchmark::DoNotOptimize(p.assembler.tangent(p.y, p.ydot, m, 0.01, 0.0, GenAlphaParams{}));
}
BENCHMARK(BM_Tangent)->Unit(benchmark::kMillisecond);

SparseMatrix poisson(int n) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int r = i * n + j;
      t.emplace_back(r, r, 4.0);
      if (i > 0) t.emplace_back(r, r - n, -1.0);
      if (i + 1 < n) t.emplace_back(r, r + n, -1.0);
      if (j > 0) t.emplace_back(r, r - 1, -1.0);
      if (j + 1 < n) t.emplace_back(r, r + 1, -1.0);
    }
  }
  SparseMatrix a(n * n, n * n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

void BM_GmresIluPoisson(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseMatrix a = poisson(n);
  const Ilu0Preconditioner ilu(a);
  const Vector b = Vector::Ones(n * n);
  const SolverSettings s{100, 1e-8, 1e-50, 1000};
  int its = 0;
  for (auto _ : state) {
    const SolveResult r = gmres(as_operator(a), ilu.as_operator(), b, Vector::Zero(n * n), s);
    its = r.stats.iterations;
  }
  state.counters["iterations"] = its;
}
BENCHMARK(BM_GmresIluPoisson)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ScrApply(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.mesh.generator = "cylinder";
  cfg.mesh.n_cross = 4;
  cfg.mesh.n_axial = 30;
  cfg.inflow.flow = Waveform::ramped(100.0, 0.5);
  OutletConfig out;
  out.group = "outlet";
  out.model = Resistance{1333.0, Waveform(0.0)};
  cfg.outlets.push_back(out);
  cfg.linear.direct = true;
  cfg.bench.warmup_steps = 2;
  const FrozenSystem sys = freeze_system(cfg, 1333.0);
  NestedSettings ns;
  ns.inner.rtol = std::pow(10.0, -static_cast<double>(state.range(0)));
  const SchurContext ctx(sys.tangent, ns);
  for (auto _ : state) benchmark::DoNotOptimize(scr_apply(ctx, sys.rhs));
  state.SetLabel("inner rtol 1e-" + std::to_string(state.range(0)));
}
BENCHMARK(BM_ScrApply)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

// the packaged benchmark_main archive is LTO bytecode from another gcc
BENCHMARK_MAIN();
