#ifndef HEMO_SIMULATION_HPP
#define HEMO_SIMULATION_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hemo/config.hpp"
#include "hemo/timestep.hpp"

namespace hemo {

Mesh build_mesh(const MeshSource& source);

/// Inlet velocity per unit flow rate over all 3N nodal slots: Poiseuille
/// shape, zero on nodes shared with a wall, and (when normalize is on) scaled
/// so its discrete flux through the inlet is exactly -1.
Vector unit_inflow_profile(const Mesh& mesh, std::size_t inlet_group, bool normalize);

/// dt = Cr * h_min / v_max with h_min the smallest circumsphere diameter.
double courant_time_step(const Mesh& mesh, double courant, double v_max);

/// Everything needed to march one configured problem in time. Owns the mesh
/// and the assembler the step problem points into, so it is not movable.
class Simulation {
 public:
  explicit Simulation(const SimulationConfig& config, std::uint64_t seed = 0);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const Mesh& mesh() const { return *mesh_; }
  const Assembler& assembler() const { return *assembler_; }
  const StepProblem& problem() const { return problem_; }
  StepProblem& problem() { return problem_; }
  double dt() const { return dt_; }
  const SimulationConfig& config() const { return config_; }
  /// Outlet group names in assembler order.
  const std::vector<std::string>& outlet_names() const { return outlet_names_; }

  /// Rest state with the inflow of t = 0 imposed.
  KinematicState initial_state() const;

 private:
  SimulationConfig config_;
  std::shared_ptr<const Mesh> mesh_;
  std::unique_ptr<Assembler> assembler_;
  StepProblem problem_;
  Vector inflow_;
  double dt_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::string> outlet_names_;
  std::vector<double> pi0_;
};

struct RunOptions {
  /// Skips everything that depends on wall-clock time (timings.csv).
  bool deterministic = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  /// Called after every step with the step index (1-based).
  std::function<void(int step, const KinematicState&, const TimeStepReport&)> on_step;
};

struct RunSummary {
  int steps = 0;
  int unconverged_steps = 0;
  double dt = 0.0;
  KinematicState final_state;
  std::vector<TimeStepReport> reports;
  std::filesystem::path output_dir;
};

/// Marches the configured number of steps and writes
///   steps.csv    step,time,newton_iterations,corrections,converged,
///                residual_initial,residual_final,linear_iterations,
///                then Q_<outlet>,P_<outlet>,P_<outlet>_mmHg per outlet
///   linear.csv   step,newton_iteration,iteration,rel_residual
///   timings.csv  step,assembly_seconds,solve_seconds (not in deterministic mode)
///   step_<n>.vtk every vtk_every steps, final_state.vtk at the end.
/// A solver exception still flushes the CSVs of the completed steps before
/// it propagates.
RunSummary run_simulation(const SimulationConfig& config, const RunOptions& options = {});

}  // namespace hemo

#endif  // HEMO_SIMULATION_HPP
