#include "hemo/bench.hpp"

#include <chrono>
#include <cstdio>

#include "hemo/output.hpp"
#include "hemo/simulation.hpp"

namespace hemo {

FrozenSystem freeze_system(const SimulationConfig& config, double resistance, std::uint64_t seed) {
  if (!(resistance >= 0.0)) throw ConfigError("bench resistance must be non-negative");
  SimulationConfig cfg = config;
  for (OutletConfig& o : cfg.outlets) {
    o.model = Resistance{resistance, Waveform(0.0)};
    o.pi0 = 0.0;
  }
  const Simulation sim(cfg, seed);
  KinematicState state = sim.initial_state();
  for (int s = 0; s < cfg.bench.warmup_steps; ++s) advance_step(sim.problem(), state, sim.dt());

  NewtonSystem sys = newton_system(sim.problem(), state, sim.dt());
  FrozenSystem out;
  out.resistance = resistance;
  out.tangent = std::move(sys.tangent);
  out.rhs = -sys.residual.stacked();
  out.operator_hash = fingerprint(out.tangent);
  out.rhs_hash = fingerprint(out.rhs);
  return out;
}

LinearSolverConfig bench_solver_config(const LinearSolverConfig& base, BlockPrecond precond, double inner_rtol) {
  LinearSolverConfig cfg = base;
  cfg.direct = false;
  cfg.precond = precond;
  if (inner_rtol > 0.0) cfg.nested.inner.rtol = inner_rtol;
  return cfg;
}

BenchCase run_bench_case(const FrozenSystem& system, const LinearSolverConfig& base, BlockPrecond precond,
                         double inner_rtol) {
  BenchCase c;
  c.resistance = system.resistance;
  c.precond = precond;
  c.inner_rtol = precond == BlockPrecond::scr ? inner_rtol : 0.0;
  c.operator_hash = system.operator_hash;
  c.rhs_hash = system.rhs_hash;
  const auto t0 = std::chrono::steady_clock::now();
  c.report = solve_block_system(system.tangent, system.rhs, bench_solver_config(base, precond, c.inner_rtol));
  c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.report.x = Vector();
  return c;
}

namespace {

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::string case_file(const BenchCase& c) {
  std::string name = "bench_R" + short_number(c.resistance) + "_" + std::string(to_string(c.precond));
  if (c.inner_rtol > 0.0) name += "_dI" + short_number(c.inner_rtol);
  return name + ".csv";
}

}  // namespace

std::vector<BenchCase> benchmark_preconditioners(const SimulationConfig& config, const BenchOptions& options) {
  const BenchConfig& b = config.bench;
  if (b.resistances.empty() || b.preconditioners.empty()) throw ConfigError("[bench]: nothing to run");
  const std::filesystem::path dir = options.output_dir.value_or(config.output_dir);

  std::vector<BenchCase> cases;
  CsvWriter summary({"resistance", "preconditioner", "inner_rtol", "iterations", "final_rel_residual", "status",
                     "stagnated", "a_iterations", "s_iterations", "inner_iterations", "wall_seconds"});
  for (double r : b.resistances) {
    const FrozenSystem sys = freeze_system(config, r, options.seed.value_or(config.seed));
    for (BlockPrecond p : b.preconditioners) {
      std::vector<double> tols{0.0};
      if (p == BlockPrecond::scr) tols = b.inner_tolerances;
      for (double tol : tols) {
        BenchCase c = run_bench_case(sys, config.linear, p, tol);
        const SolveStats& st = c.report.outer;
        const std::string wall = options.deterministic ? "" : format_double(c.wall_seconds);

        CsvWriter csv({"iteration", "rel_residual"});
        csv.comment("operator_hash=" + hex(c.operator_hash));
        csv.comment("rhs_hash=" + hex(c.rhs_hash));
        csv.comment("resistance=" + format_double(r));
        csv.comment("preconditioner=" + std::string(to_string(p)));
        csv.comment("inner_rtol=" + (c.inner_rtol > 0.0 ? format_double(c.inner_rtol) : std::string("-")));
        csv.comment("status=" + std::string(st.converged ? "converged" : "NC"));
        if (!options.deterministic) csv.comment("wall_seconds=" + wall);
        for (std::size_t i = 0; i < st.history.size(); ++i) csv.row({std::to_string(i), format_double(st.history[i])});
        csv.save(dir / case_file(c));

        summary.row({format_double(r), std::string(to_string(p)),
                     c.inner_rtol > 0.0 ? format_double(c.inner_rtol) : "-", std::to_string(st.iterations),
                     format_double(st.relative_residual), st.converged ? "converged" : "NC",
                     st.stagnated ? "1" : "0", std::to_string(c.report.sub.a_iterations),
                     std::to_string(c.report.sub.s_iterations), std::to_string(c.report.sub.inner_iterations), wall});
        cases.push_back(std::move(c));
      }
    }
  }
  summary.save(dir / "bench_summary.csv");
  return cases;
}

}  // namespace hemo
