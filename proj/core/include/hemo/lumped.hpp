#ifndef HEMO_LUMPED_HPP
#define HEMO_LUMPED_HPP

#include <functional>
#include <span>
#include <variant>

#include "hemo/waveform.hpp"

namespace hemo {

/// Three-element (RCR) Windkessel. Units: resistances g/(s cm^4),
/// compliance cm^4 s^2/g, pressures dyn/cm^2.
struct Windkessel {
  double proximal_resistance = 0.0;
  double capacitance = 1.0;
  double distal_resistance = 0.0;
  Waveform distal_pressure;
};

/// P = R Q + P_d(t).
struct Resistance {
  double resistance = 0.0;
  Waveform distal_pressure;
};

using LumpedModel = std::variant<Windkessel, Resistance>;

/// Throws ConfigError when a coefficient violates its sign constraint.
void validate(const LumpedModel& model);

inline constexpr int kDefaultSubintervals = 100;
inline constexpr double kTangentEpsAbs = 1e-8;
inline constexpr double kTangentEpsRel = 1e-5;

/// dPi/dt = -Pi / (R_d C) + Q / C
double rcr_rhs(double pi, double flow, const Windkessel& model);

struct LumpedUpdate {
  double pressure = 0.0;  ///< P at t_{n+1}
  double pi = 0.0;        ///< distal pressure drop at t_{n+1}
};

/// Explicit RK4 (3/8-rule stages) over n_ts equal subintervals of
/// [t_n, t_n + dt], with the flow rate interpolated linearly between q_n and
/// q_np1.
LumpedUpdate rk4_advance(const Windkessel& model, double pi_n, double q_n, double q_np1,
                         double t_n, double dt, int n_ts = kDefaultSubintervals);

/// Closed-form Windkessel response to a flow history, with the convolution
/// integral evaluated by adaptive Gauss-Kronrod quadrature between the given
/// breakpoints (kinks of the flow history). p0 is P(0).
double analytic_pressure(const Windkessel& model, const std::function<double(double)>& flow,
                         std::span<const double> breakpoints, double t, double p0);
double analytic_pressure(const Windkessel& model, const Waveform& flow, double t, double p0);

double resistance_pressure(const Resistance& model, double flow, double t);

/// One reduced-model step for either variant. For a resistance the returned
/// pi is always zero.
LumpedUpdate advance_outlet(const LumpedModel& model, double pi_n, double q_n, double q_np1,
                            double t_n, double dt, int n_ts = kDefaultSubintervals);

/// dP_{n+1}/dQ_{n+1}: exactly R for a resistance, a central difference of the
/// RK4 map for a Windkessel.
double tangent_m(const LumpedModel& model, double pi_n, double q_n, double q_np1, double t_n,
                 double dt, int n_ts = kDefaultSubintervals);

/// Outlet pressure consistent with a given Pi and Q at time t.
double outlet_pressure(const LumpedModel& model, double pi, double flow, double t);

}  // namespace hemo

#endif  // HEMO_LUMPED_HPP
