#ifndef HEMO_MMS_HPP
#define HEMO_MMS_HPP

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hemo/config.hpp"
#include "hemo/timestep.hpp"

namespace hemo {

/// Divergence-free velocity and a pressure, with the derivatives needed to
/// build the forcing and the boundary data.
struct ExactSolution {
  std::string name;
  std::function<Vec3(const Vec3&, double)> velocity;
  std::function<Vec3(const Vec3&, double)> velocity_rate;  ///< dv/dt
  std::function<Mat3(const Vec3&, double)> gradient;       ///< (grad v)_ij = dv_i/dx_j
  std::function<Vec3(const Vec3&, double)> laplacian;      ///< lap v
  std::function<double(const Vec3&, double)> pressure;
  std::function<double(const Vec3&, double)> pressure_rate;
  std::function<Vec3(const Vec3&, double)> pressure_gradient;
};

/// v = A(t) x + c(t) with trace A = 0, p linear in x. Lies in the P1 space,
/// so any error is temporal.
ExactSolution linear_transient_solution();
/// Same shape frozen at t = 0.
ExactSolution linear_steady_solution();
/// v = (sin y, sin z, sin x), p = sin(x + y + z).
ExactSolution trig_steady_solution();
ExactSolution exact_solution_by_name(std::string_view name);

/// b = dv/dt + (grad v) v + grad p / rho - nu lap v.
BodyForce manufactured_body_force(const ExactSolution& exact, double density, double viscosity);

/// h = (-p I + mu (grad v + grad v^T)) n.
Vec3 exact_traction(const ExactSolution& exact, double viscosity, const Vec3& x, double t, const Vec3& n);

struct L2Errors {
  double velocity = 0.0;
  double pressure = 0.0;
};

/// Errors of the P1 fields against the exact solution at time t, integrated
/// with a collapsed 3x3x3 Gauss rule per element.
L2Errors l2_errors(const Mesh& mesh, const FlowState& state, const ExactSolution& exact, double t);

struct MmsCase {
  double dt = 0.0;
  int steps = 0;
  double h = 0.0;  ///< mesh spacing
  L2Errors errors;
  int newton_failures = 0;
};

struct MmsStudy {
  std::string kind;  ///< temporal | spatial
  std::string solution;
  std::vector<MmsCase> cases;
  /// Observed orders between consecutive cases (size cases - 1).
  std::vector<double> velocity_order;
  std::vector<double> pressure_order;
};

/// Unit-cube box mesh with Dirichlet data at x = 0 and the exact traction at
/// x = 1. The four lateral sides are Dirichlet walls, or traction sides when
/// open_sides is set (so most velocity nodes stay free). Backflow
/// stabilization is switched off so the exact solution solves the weak form.
MmsCase run_manufactured_case(const ExactSolution& exact, int cells, double dt, int steps,
                              const SimulationConfig& config, bool open_sides = false);

/// Fixed mesh with open sides, one case per configured step count over
/// [0, final_time].
MmsStudy temporal_study(const SimulationConfig& config, const ExactSolution& exact);
/// Nested meshes with a large dt and a steady solution.
MmsStudy spatial_study(const SimulationConfig& config, const ExactSolution& exact);

double observed_order(double e_coarse, double e_fine, double ratio);

/// Columns: kind,solution,dt,steps,h,velocity_l2,pressure_l2,velocity_order,pressure_order
std::string format_study(const std::vector<MmsStudy>& studies);

}  // namespace hemo

#endif  // HEMO_MMS_HPP
