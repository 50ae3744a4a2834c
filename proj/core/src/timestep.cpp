#include "hemo/timestep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <tuple>

namespace hemo {

GenAlphaParams genalpha_params(double rho_inf) {
  if (!(rho_inf >= 0.0 && rho_inf <= 1.0)) throw ConfigError("rho_inf must lie in [0, 1]");
  GenAlphaParams p;
  p.rho_inf = rho_inf;
  p.alpha_m = 0.5 * (3.0 - rho_inf) / (1.0 + rho_inf);
  p.alpha_f = 1.0 / (1.0 + rho_inf);
  p.gamma = 1.0 / (1.0 + rho_inf);
  return p;
}

void NewtonSettings::validate() const {
  if (!(tol_r > 0.0) || !(tol_a > 0.0)) throw ConfigError("Newton tolerances must be positive");
  if (max_iterations < 1) throw ConfigError("Newton iteration cap must be at least 1");
  if (!(divergence_factor > 1.0)) throw ConfigError("divergence factor must exceed 1");
}

std::pair<FlowState, FlowState> predictor(const FlowState& y_n, const FlowState& ydot_n, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("predictor: gamma must be positive");
  const double s = (gamma - 1.0) / gamma;
  return {y_n, FlowState{s * ydot_n.v, s * ydot_n.p}};
}

std::pair<FlowState, FlowState> intermediate_state(const FlowState& y_n, const FlowState& ydot_n,
                                                   const FlowState& y_np1, const FlowState& ydot_np1,
                                                   const GenAlphaParams& ga) {
  FlowState y{y_n.v + ga.alpha_f * (y_np1.v - y_n.v), y_n.p + ga.alpha_f * (y_np1.p - y_n.p)};
  FlowState yd{ydot_n.v + ga.alpha_m * (ydot_np1.v - ydot_n.v), ydot_n.p + ga.alpha_m * (ydot_np1.p - ydot_n.p)};
  return {std::move(y), std::move(yd)};
}

void corrector_update(FlowState& y, FlowState& ydot, const FlowState& delta, double gamma, double dt) {
  y.v += (gamma * dt) * delta.v;
  y.p += (gamma * dt) * delta.p;
  ydot.v += delta.v;
  ydot.p += delta.p;
}

double update_rule_residual(const FlowState& y_n, const FlowState& ydot_n, const FlowState& y_np1,
                            const FlowState& ydot_np1, double gamma, double dt) {
  const auto part = [&](const Vector& a, const Vector& ad, const Vector& b, const Vector& bd) {
    return (b - a - dt * ad - gamma * dt * (bd - ad)).squaredNorm();
  };
  const double r = std::sqrt(part(y_n.v, ydot_n.v, y_np1.v, ydot_np1.v) + part(y_n.p, ydot_n.p, y_np1.p, ydot_np1.p));
  const double scale = std::max({std::hypot(y_np1.v.norm(), y_np1.p.norm()), std::hypot(y_n.v.norm(), y_n.p.norm()),
                                 dt * std::hypot(ydot_n.v.norm(), ydot_n.p.norm()), 1e-300});
  return r / scale;
}

namespace {

void check_problem(const StepProblem& problem) {
  if (problem.assembler == nullptr) throw ConfigError("step problem has no assembler");
  if (problem.outlets.size() != problem.assembler->num_outlets()) {
    throw ConfigError("one outlet condition per outlet group is required");
  }
  for (const auto& o : problem.outlets) {
    if (o.model) validate(*o.model);
    if (!o.model && !o.traction) throw ConfigError("outlet needs either a reduced model or a traction");
  }
  problem.newton.validate();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

KinematicState make_initial_state(const StepProblem& problem, FlowState y, FlowState ydot, std::vector<double> pi,
                                  double time) {
  check_problem(problem);
  const std::size_t n_out = problem.outlets.size();
  if (pi.empty()) pi.assign(n_out, 0.0);
  if (pi.size() != n_out) throw ConfigError("initial Pi needs one value per outlet");
  KinematicState s;
  s.time = time;
  s.y = std::move(y);
  s.ydot = std::move(ydot);
  s.pi = std::move(pi);
  s.flow = problem.assembler->flow_rates(s.y.v);
  s.pressure.assign(n_out, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    if (problem.outlets[k].model) s.pressure[k] = outlet_pressure(*problem.outlets[k].model, s.pi[k], s.flow[k], time);
  }
  return s;
}

namespace {

// Predictor with the Dirichlet values of t_{n+1} imposed consistently.
std::pair<FlowState, FlowState> predict(const StepProblem& problem, const KinematicState& state, double dt) {
  const DofMap& dofs = problem.assembler->dofs();
  const double gamma = problem.ga.gamma;
  auto out = predictor(state.y, state.ydot, gamma);
  if (dofs.constrained_nodes().empty()) return out;
  Vector g = state.y.v;
  if (problem.dirichlet) {
    problem.dirichlet(state.time + dt, g);
  } else {
    for (int node : dofs.constrained_nodes()) g.segment<3>(3 * node).setZero();
  }
  for (int node : dofs.constrained_nodes()) {
    for (int i = 0; i < 3; ++i) {
      const int k = 3 * node + i;
      out.first.v(k) = g(k);
      out.second.v(k) = state.ydot.v(k) + (g(k) - state.y.v(k) - dt * state.ydot.v(k)) / (gamma * dt);
    }
  }
  return out;
}

struct Evaluation {
  FlowState y_af;
  FlowState ydot_am;
  std::vector<OutletLoad> loads;
  std::vector<double> m;
  Residual residual;
};

// Steps 1-6 of one multicorrector pass.
Evaluation evaluate(const StepProblem& problem, const KinematicState& state, const FlowState& y,
                    const FlowState& ydot, double dt) {
  const Assembler& asmb = *problem.assembler;
  const GenAlphaParams& ga = problem.ga;
  const std::size_t n_out = problem.outlets.size();
  const double t_n = state.time;
  const double t_af = t_n + ga.alpha_f * dt;

  Evaluation ev;
  ev.loads.resize(n_out);
  ev.m.assign(n_out, 0.0);
  const std::vector<double> q = asmb.flow_rates(y.v);
  for (std::size_t k = 0; k < n_out; ++k) {
    const auto& oc = problem.outlets[k];
    if (!oc.model) {
      const auto& h = oc.traction;
      ev.loads[k].traction = [&h, t_af](const Vec3& x) { return h(x, t_af); };
      continue;
    }
    const double p_np1 = advance_outlet(*oc.model, state.pi[k], state.flow[k], q[k], t_n, dt, oc.subintervals).pressure;
    ev.m[k] = tangent_m(*oc.model, state.pi[k], state.flow[k], q[k], t_n, dt, oc.subintervals);
    ev.loads[k].pressure = (1.0 - ga.alpha_f) * state.pressure[k] + ga.alpha_f * p_np1;
  }
  std::tie(ev.y_af, ev.ydot_am) = intermediate_state(state.y, state.ydot, y, ydot, ga);
  ev.residual = asmb.residual(ev.y_af, ev.ydot_am, ev.loads, dt, t_af);
  return ev;
}

}  // namespace

NewtonSystem newton_system(const StepProblem& problem, const KinematicState& state, double dt) {
  check_problem(problem);
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const auto [y, ydot] = predict(problem, state, dt);
  Evaluation ev = evaluate(problem, state, y, ydot, dt);
  NewtonSystem sys;
  sys.tangent = problem.assembler->tangent(ev.y_af, ev.ydot_am, ev.m, dt, state.time + problem.ga.alpha_f * dt,
                                           problem.ga);
  sys.residual = std::move(ev.residual);
  return sys;
}

TimeStepReport advance_step(const StepProblem& problem, KinematicState& state, double dt) {
  check_problem(problem);
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const Assembler& asmb = *problem.assembler;
  const DofMap& dofs = asmb.dofs();
  const GenAlphaParams& ga = problem.ga;
  const NewtonSettings& nw = problem.newton;
  const double t_n = state.time;
  const double t_np1 = t_n + dt;

  TimeStepReport report;
  auto [y, ydot] = predict(problem, state, dt);

  double r0 = 0.0;
  for (int l = 0;; ++l) {
    const auto t_asm = Clock::now();
    const Evaluation ev = evaluate(problem, state, y, ydot, dt);
    const double norm = ev.residual.norm();
    if (!std::isfinite(norm)) throw SolverError("Newton: non-finite residual at t = " + std::to_string(t_np1));
    report.residual_norms.push_back(norm);
    if (l == 0) r0 = norm;

    const bool done = norm <= nw.tol_a || (l > 0 && norm <= nw.tol_r * r0);
    if (done || l >= nw.max_iterations) {
      report.assembly_seconds += seconds_since(t_asm);
      report.iterations = l + 1;
      report.corrections = l;
      report.converged = done;
      break;
    }
    if (l > 0 && norm > nw.divergence_factor * r0) {
      throw SolverError("Newton diverged at t = " + std::to_string(t_np1) + ": residual grew from " +
                        std::to_string(r0) + " to " + std::to_string(norm));
    }
    const BlockTangent tangent = asmb.tangent(ev.y_af, ev.ydot_am, ev.m, dt, t_n + ga.alpha_f * dt, ga);
    report.assembly_seconds += seconds_since(t_asm);

    const auto t_solve = Clock::now();
    LinearSolveReport lin = solve_block_system(tangent, -ev.residual.stacked(), problem.linear);
    report.solve_seconds += seconds_since(t_solve);

    FlowState delta = FlowState::zero(static_cast<std::size_t>(dofs.num_nodes()));
    dofs.add_velocity(lin.x.head(dofs.num_velocity()), delta.v);
    delta.p = lin.x.tail(dofs.num_pressure());
    corrector_update(y, ydot, delta, ga.gamma, dt);
    lin.x = Vector();
    report.linear.push_back(std::move(lin));
  }

  if (!report.converged && nw.abort_on_failure) {
    throw SolverError("Newton did not converge within " + std::to_string(nw.max_iterations) +
                      " iterations at t = " + std::to_string(t_np1));
  }

  // reduced-model state at t_{n+1} from the accepted flow rates
  const std::vector<double> q = asmb.flow_rates(y.v);
  for (std::size_t k = 0; k < problem.outlets.size(); ++k) {
    const auto& oc = problem.outlets[k];
    if (!oc.model) continue;
    const LumpedUpdate upd = advance_outlet(*oc.model, state.pi[k], state.flow[k], q[k], t_n, dt, oc.subintervals);
    state.pi[k] = upd.pi;
    state.pressure[k] = upd.pressure;
  }
  state.flow = q;
  state.y = std::move(y);
  state.ydot = std::move(ydot);
  state.time = t_np1;
  return report;
}

}  // namespace hemo
