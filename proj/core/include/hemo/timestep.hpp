#ifndef HEMO_TIMESTEP_HPP
#define HEMO_TIMESTEP_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hemo/assembly.hpp"
#include "hemo/genalpha.hpp"
#include "hemo/lumped.hpp"
#include "hemo/precond.hpp"

namespace hemo {

struct NewtonSettings {
  double tol_r = 1e-6;
  double tol_a = 1e-6;
  int max_iterations = 20;
  /// The step is aborted once ||R_(l)|| exceeds this multiple of ||R_(0)||.
  double divergence_factor = 1e4;
  /// Throw when l_max is reached instead of accepting the last iterate.
  bool abort_on_failure = false;

  void validate() const;
};

/// Solution pair at t_n plus the per-outlet reduced-model state.
struct KinematicState {
  double time = 0.0;
  FlowState y;
  FlowState ydot;
  std::vector<double> pi;        ///< Pi^k_n (zero for non-Windkessel outlets)
  std::vector<double> flow;      ///< Q^k_n
  std::vector<double> pressure;  ///< P^k_n (unused for traction outlets)
};

/// Neumann outlet: a reduced model, or a prescribed traction h(x, t) when no
/// model is given.
struct OutletCondition {
  std::optional<LumpedModel> model;
  std::function<Vec3(const Vec3& x, double t)> traction;
  int subintervals = kDefaultSubintervals;
};

/// Writes the Dirichlet velocity at time t into a full nodal vector. Only the
/// entries of constrained nodes are read back.
using DirichletFunction = std::function<void(double t, Vector& v)>;

struct StepProblem {
  const Assembler* assembler = nullptr;
  std::vector<OutletCondition> outlets;
  DirichletFunction dirichlet;  ///< empty means homogeneous
  GenAlphaParams ga;
  NewtonSettings newton;
  LinearSolverConfig linear;
};

struct TimeStepReport {
  /// Residual evaluations, l_exit + 1 (so an already-converged predictor
  /// counts as one iteration).
  int iterations = 0;
  /// Linear solves performed (= l_exit).
  int corrections = 0;
  bool converged = false;
  std::vector<double> residual_norms;  ///< ||R_(l)||, entry 0 is the predictor
  std::vector<LinearSolveReport> linear;  ///< solution vectors dropped
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
};

// -- scheme building blocks ---------------------------------------------

/// ydot_{n+1,(0)} = (gamma - 1) / gamma * ydot_n; y_{n+1,(0)} = y_n.
std::pair<FlowState, FlowState> predictor(const FlowState& y_n, const FlowState& ydot_n, double gamma);

/// (y_{n+alpha_f}, ydot_{n+alpha_m}).
std::pair<FlowState, FlowState> intermediate_state(const FlowState& y_n, const FlowState& ydot_n,
                                                   const FlowState& y_np1, const FlowState& ydot_np1,
                                                   const GenAlphaParams& ga);

/// y += gamma dt delta, ydot += delta.
void corrector_update(FlowState& y, FlowState& ydot, const FlowState& delta, double gamma, double dt);

/// ||y_{n+1} - y_n - dt ydot_n - gamma dt (ydot_{n+1} - ydot_n)|| relative to
/// max(||y_{n+1}||, ||y_n||, dt ||ydot_n||, 1e-300).
double update_rule_residual(const FlowState& y_n, const FlowState& ydot_n, const FlowState& y_np1,
                            const FlowState& ydot_np1, double gamma, double dt);

/// Completes a state at `time` with the outlet flow rates and pressures.
KinematicState make_initial_state(const StepProblem& problem, FlowState y, FlowState ydot,
                                  std::vector<double> pi, double time);

/// Residual and tangent at the predictor of the step t_n -> t_n + dt.
struct NewtonSystem {
  BlockTangent tangent;
  Residual residual;
};

NewtonSystem newton_system(const StepProblem& problem, const KinematicState& state, double dt);

/// One predictor-multicorrector step from t_n to t_n + dt. The state is
/// replaced by the accepted solution at t_{n+1} unless an exception is thrown.
TimeStepReport advance_step(const StepProblem& problem, KinematicState& state, double dt);

}  // namespace hemo

#endif  // HEMO_TIMESTEP_HPP
