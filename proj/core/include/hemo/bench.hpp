#ifndef HEMO_BENCH_HPP
#define HEMO_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hemo/config.hpp"
#include "hemo/timestep.hpp"

namespace hemo {

/// One Newton system frozen from a run: tangent and right-hand side -R.
struct FrozenSystem {
  double resistance = 0.0;
  BlockTangent tangent;
  Vector rhs;
  std::uint64_t operator_hash = 0;
  std::uint64_t rhs_hash = 0;
};

/// Replaces every outlet model with a plain resistance R, marches
/// warmup_steps steps from rest and freezes the predictor-level system of the
/// next step.
FrozenSystem freeze_system(const SimulationConfig& config, double resistance, std::uint64_t seed = 0);

struct BenchCase {
  double resistance = 0.0;
  BlockPrecond precond = BlockPrecond::scr;
  double inner_rtol = 0.0;  ///< 0 for preconditioners without an inner solve
  LinearSolveReport report;
  double wall_seconds = 0.0;
  std::uint64_t operator_hash = 0;
  std::uint64_t rhs_hash = 0;
};

/// Solver configuration of one benchmark case on top of the configured
/// linear solver settings.
LinearSolverConfig bench_solver_config(const LinearSolverConfig& base, BlockPrecond precond, double inner_rtol);

BenchCase run_bench_case(const FrozenSystem& system, const LinearSolverConfig& base, BlockPrecond precond,
                         double inner_rtol);

struct BenchOptions {
  bool deterministic = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

/// Every (R, preconditioner, inner tolerance) of the [bench] section. Writes
/// bench_R<R>_<precond>[_dI<tol>].csv (iteration,rel_residual with
/// `# key=value` header lines including operator_hash and rhs_hash) and
/// bench_summary.csv (status NC for no convergence).
std::vector<BenchCase> benchmark_preconditioners(const SimulationConfig& config, const BenchOptions& options = {});

}  // namespace hemo

#endif  // HEMO_BENCH_HPP
