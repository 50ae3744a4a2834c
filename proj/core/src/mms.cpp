#include "hemo/mms.hpp"

#include <array>
#include <cmath>

#include "hemo/generators.hpp"
#include "hemo/output.hpp"

namespace hemo {

namespace {

const Mat3& base_matrix() {
  static const Mat3 a0 = (Mat3() << 0.5, 1.0, 0.0, 0.0, -0.5, 1.0, 1.0, 0.0, 0.0).finished();
  return a0;
}

const Vec3 kPressureDir(1.0, -0.5, 0.25);

Mat3 a_of(double t) { return std::cos(2.0 * t) * base_matrix(); }
Mat3 a_rate(double t) { return -2.0 * std::sin(2.0 * t) * base_matrix(); }
Vec3 c_of(double t) { return {1.0 + 0.5 * std::sin(3.0 * t), std::cos(2.0 * t), 0.5 * std::sin(t)}; }
Vec3 c_rate(double t) { return {1.5 * std::cos(3.0 * t), -2.0 * std::sin(2.0 * t), 0.5 * std::cos(t)}; }
double p_amp(double t) { return 2.0 + std::sin(2.0 * t); }

}  // namespace

ExactSolution linear_transient_solution() {
  ExactSolution s;
  s.name = "linear-transient";
  s.velocity = [](const Vec3& x, double t) -> Vec3 { return a_of(t) * x + c_of(t); };
  s.velocity_rate = [](const Vec3& x, double t) -> Vec3 { return a_rate(t) * x + c_rate(t); };
  s.gradient = [](const Vec3&, double t) -> Mat3 { return a_of(t); };
  s.laplacian = [](const Vec3&, double) -> Vec3 { return Vec3::Zero(); };
  s.pressure = [](const Vec3& x, double t) { return p_amp(t) * kPressureDir.dot(x) + std::cos(t); };
  s.pressure_rate = [](const Vec3& x, double t) { return 2.0 * std::cos(2.0 * t) * kPressureDir.dot(x) - std::sin(t); };
  s.pressure_gradient = [](const Vec3&, double t) -> Vec3 { return p_amp(t) * kPressureDir; };
  return s;
}

ExactSolution linear_steady_solution() {
  ExactSolution s = linear_transient_solution();
  const ExactSolution moving = s;
  s.name = "linear-steady";
  s.velocity = [moving](const Vec3& x, double) { return moving.velocity(x, 0.0); };
  s.velocity_rate = [](const Vec3&, double) -> Vec3 { return Vec3::Zero(); };
  s.gradient = [moving](const Vec3& x, double) { return moving.gradient(x, 0.0); };
  s.pressure = [moving](const Vec3& x, double) { return moving.pressure(x, 0.0); };
  s.pressure_rate = [](const Vec3&, double) { return 0.0; };
  s.pressure_gradient = [moving](const Vec3& x, double) { return moving.pressure_gradient(x, 0.0); };
  return s;
}

ExactSolution trig_steady_solution() {
  ExactSolution s;
  s.name = "trig-steady";
  s.velocity = [](const Vec3& x, double) -> Vec3 { return {std::sin(x(1)), std::sin(x(2)), std::sin(x(0))}; };
  s.velocity_rate = [](const Vec3&, double) -> Vec3 { return Vec3::Zero(); };
  s.gradient = [](const Vec3& x, double) -> Mat3 {
    Mat3 g = Mat3::Zero();
    g(0, 1) = std::cos(x(1));
    g(1, 2) = std::cos(x(2));
    g(2, 0) = std::cos(x(0));
    return g;
  };
  s.laplacian = [](const Vec3& x, double) -> Vec3 { return {-std::sin(x(1)), -std::sin(x(2)), -std::sin(x(0))}; };
  s.pressure = [](const Vec3& x, double) { return std::sin(x.sum()); };
  s.pressure_rate = [](const Vec3&, double) { return 0.0; };
  s.pressure_gradient = [](const Vec3& x, double) -> Vec3 { return Vec3::Constant(std::cos(x.sum())); };
  return s;
}

ExactSolution exact_solution_by_name(std::string_view name) {
  if (name == "linear-transient") return linear_transient_solution();
  if (name == "linear-steady") return linear_steady_solution();
  if (name == "trig-steady") return trig_steady_solution();
  throw ConfigError("unknown manufactured solution '" + std::string(name) + "'");
}

BodyForce manufactured_body_force(const ExactSolution& exact, double density, double viscosity) {
  const double nu = viscosity / density;
  return [exact, density, nu](const Vec3& x, double t) -> Vec3 {
    const Vec3 v = exact.velocity(x, t);
    return exact.velocity_rate(x, t) + exact.gradient(x, t) * v + exact.pressure_gradient(x, t) / density -
           nu * exact.laplacian(x, t);
  };
}

Vec3 exact_traction(const ExactSolution& exact, double viscosity, const Vec3& x, double t, const Vec3& n) {
  const Mat3 g = exact.gradient(x, t);
  const Mat3 sigma = -exact.pressure(x, t) * Mat3::Identity() + viscosity * (g + g.transpose());
  return sigma * n;
}

L2Errors l2_errors(const Mesh& mesh, const FlowState& state, const ExactSolution& exact, double t) {
  // Gauss-Legendre on [0, 1] pushed onto the tet by the collapsed map.
  const double r = 0.5 * std::sqrt(0.6);
  const std::array<double, 3> gx{0.5 - r, 0.5, 0.5 + r};
  const std::array<double, 3> gw{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

  double ev = 0.0;
  double ep = 0.0;
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const auto& tet = mesh.tet(e);
    const auto x = mesh.tet_points(e);
    const double six_vol = 6.0 * mesh.volume(e);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          const double u = gx[i], v = gx[j], w = gx[k];
          const double l1 = u, l2 = v * (1.0 - u), l3 = w * (1.0 - u) * (1.0 - v);
          const std::array<double, 4> lam{1.0 - l1 - l2 - l3, l1, l2, l3};
          const double wt = gw[i] * gw[j] * gw[k] * (1.0 - u) * (1.0 - u) * (1.0 - v) * six_vol;
          Vec3 xq = Vec3::Zero();
          Vec3 vh = Vec3::Zero();
          double ph = 0.0;
          for (int a = 0; a < 4; ++a) {
            xq += lam[a] * x[a];
            vh += lam[a] * state.v.segment<3>(3 * tet[a]);
            ph += lam[a] * state.p(tet[a]);
          }
          ev += wt * (vh - exact.velocity(xq, t)).squaredNorm();
          const double dp = ph - exact.pressure(xq, t);
          ep += wt * dp * dp;
        }
      }
    }
  }
  return {std::sqrt(ev), std::sqrt(ep)};
}

MmsCase run_manufactured_case(const ExactSolution& exact, int cells, double dt, int steps,
                              const SimulationConfig& config, bool open_sides) {
  if (cells < 1 || steps < 1 || !(dt > 0.0)) throw ConfigError("manufactured case needs cells, steps and dt > 0");
  SideGroups sides;
  if (open_sides) {
    for (int k = 1; k < 6; ++k) sides.tags[static_cast<std::size_t>(k)] = FacetTag::outlet;
  }
  const Mesh mesh = box_mesh(cells, cells, cells, Vec3(1.0, 1.0, 1.0), sides);
  FlowParams params = config.fluid;
  params.backflow_beta = 0.0;
  params.body_force = manufactured_body_force(exact, params.density, params.viscosity);
  const Assembler assembler(mesh, DofMap(mesh), params);

  StepProblem problem;
  problem.assembler = &assembler;
  const double mu = params.viscosity;
  for (std::size_t k = 0; k < assembler.num_outlets(); ++k) {
    const Vec3 n = fit_plane(mesh, assembler.outlet_group(k)).normal;
    OutletCondition oc;
    oc.traction = [exact, mu, n](const Vec3& x, double t) { return exact_traction(exact, mu, x, t, n); };
    problem.outlets.push_back(std::move(oc));
  }
  const DofMap* dofs = &assembler.dofs();
  problem.dirichlet = [exact, dofs, &mesh](double t, Vector& v) {
    for (int node : dofs->constrained_nodes()) v.segment<3>(3 * node) = exact.velocity(mesh.node(node), t);
  };
  problem.ga = genalpha_params(config.rho_inf);
  problem.newton = config.newton;
  problem.newton.tol_a = std::min(problem.newton.tol_a, 1e-12);
  problem.newton.tol_r = std::min(problem.newton.tol_r, 1e-11);
  problem.linear = config.linear;
  problem.linear.direct = true;

  const std::size_t n = mesh.num_nodes();
  FlowState y = FlowState::zero(n), ydot = FlowState::zero(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Vec3& x = mesh.node(static_cast<int>(a));
    const auto i = static_cast<Eigen::Index>(a);
    y.v.segment<3>(3 * i) = exact.velocity(x, 0.0);
    ydot.v.segment<3>(3 * i) = exact.velocity_rate(x, 0.0);
    y.p(i) = exact.pressure(x, 0.0);
    ydot.p(i) = exact.pressure_rate(x, 0.0);
  }
  KinematicState state = make_initial_state(problem, std::move(y), std::move(ydot), {}, 0.0);

  MmsCase out;
  out.dt = dt;
  out.steps = steps;
  out.h = 1.0 / cells;
  for (int s = 0; s < steps; ++s) {
    const TimeStepReport rep = advance_step(problem, state, dt);
    if (!rep.converged) ++out.newton_failures;
  }
  out.errors = l2_errors(mesh, state.y, exact, state.time);
  return out;
}

double observed_order(double e_coarse, double e_fine, double ratio) {
  return std::log(e_coarse / e_fine) / std::log(ratio);
}

namespace {

void fill_orders(MmsStudy& study, bool temporal) {
  for (std::size_t i = 1; i < study.cases.size(); ++i) {
    const MmsCase& a = study.cases[i - 1];
    const MmsCase& b = study.cases[i];
    const double ratio = temporal ? a.dt / b.dt : a.h / b.h;
    study.velocity_order.push_back(observed_order(a.errors.velocity, b.errors.velocity, ratio));
    study.pressure_order.push_back(observed_order(a.errors.pressure, b.errors.pressure, ratio));
  }
}

}  // namespace

MmsStudy temporal_study(const SimulationConfig& config, const ExactSolution& exact) {
  const MmsConfig& m = config.mms;
  if (m.temporal_steps.empty() || !(m.final_time > 0.0)) throw ConfigError("[mms]: empty temporal sweep");
  MmsStudy study;
  study.kind = "temporal";
  study.solution = exact.name;
  for (int steps : m.temporal_steps) {
    study.cases.push_back(run_manufactured_case(exact, m.temporal_mesh, m.final_time / steps, steps, config, true));
  }
  fill_orders(study, true);
  return study;
}

MmsStudy spatial_study(const SimulationConfig& config, const ExactSolution& exact) {
  const MmsConfig& m = config.mms;
  if (m.spatial_levels.empty()) throw ConfigError("[mms]: empty spatial sweep");
  MmsStudy study;
  study.kind = "spatial";
  study.solution = exact.name;
  for (int cells : m.spatial_levels) {
    study.cases.push_back(run_manufactured_case(exact, cells, m.spatial_dt, m.spatial_steps, config));
  }
  fill_orders(study, false);
  return study;
}

std::string format_study(const std::vector<MmsStudy>& studies) {
  CsvWriter csv({"kind", "solution", "dt", "steps", "h", "velocity_l2", "pressure_l2", "velocity_order",
                 "pressure_order"});
  for (const MmsStudy& s : studies) {
    for (std::size_t i = 0; i < s.cases.size(); ++i) {
      const MmsCase& c = s.cases[i];
      csv.row({s.kind, s.solution, format_double(c.dt), std::to_string(c.steps), format_double(c.h),
               format_double(c.errors.velocity), format_double(c.errors.pressure),
               i == 0 ? "" : format_double(s.velocity_order[i - 1]),
               i == 0 ? "" : format_double(s.pressure_order[i - 1])});
    }
  }
  return csv.str();
}

}  // namespace hemo
