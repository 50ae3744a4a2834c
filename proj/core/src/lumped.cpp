#include "hemo/lumped.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "hemo/common.hpp"

namespace hemo {

Waveform Waveform::table(std::vector<double> times, std::vector<double> values, bool periodic) {
  if (times.empty() || times.size() != values.size()) {
    throw ConfigError("waveform table needs matching, non-empty time and value lists");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("waveform times must increase strictly");
  }
  if (periodic && times.size() < 2) throw ConfigError("periodic waveform needs two samples");
  Waveform w;
  w.times_ = std::move(times);
  w.values_ = std::move(values);
  w.periodic_ = periodic;
  return w;
}

Waveform Waveform::ramped(double target, double ramp_time) {
  if (!(ramp_time > 0.0)) return Waveform(target);
  return table({0.0, ramp_time}, {0.0, target});
}

double Waveform::operator()(double t) const {
  if (times_.empty()) return values_.front();
  if (periodic_) {
    const double t0 = times_.front();
    const double period = times_.back() - t0;
    t = t0 + std::fmod(std::fmod(t - t0, period) + period, period);
  }
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times_.begin());
  const double s = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - s) * values_[i - 1] + s * values_[i];
}

void validate(const LumpedModel& model) {
  if (const auto* w = std::get_if<Windkessel>(&model)) {
    if (!(w->proximal_resistance >= 0.0) || !(w->distal_resistance >= 0.0)) {
      throw ConfigError("Windkessel resistances must be non-negative");
    }
    if (!(w->capacitance > 0.0)) throw ConfigError("Windkessel capacitance must be positive");
  } else {
    if (!(std::get<Resistance>(model).resistance >= 0.0)) {
      throw ConfigError("outlet resistance must be non-negative");
    }
  }
}

double rcr_rhs(double pi, double flow, const Windkessel& model) {
  return -pi / (model.distal_resistance * model.capacitance) + flow / model.capacitance;
}

LumpedUpdate rk4_advance(const Windkessel& model, double pi_n, double q_n, double q_np1, double t_n,
                         double dt, int n_ts) {
  if (n_ts < 1) throw ConfigError("rk4_advance needs at least one subinterval");
  const double h = dt / n_ts;
  const auto flow_at = [&](int m) {
    const double s = double(m) / n_ts;
    return (1.0 - s) * q_n + s * q_np1;
  };
  double pi = pi_n;
  for (int m = 0; m < n_ts; ++m) {
    const double q0 = flow_at(m);
    const double q1 = flow_at(m + 1);
    const double k1 = rcr_rhs(pi, q0, model);
    const double k2 = rcr_rhs(pi + k1 * h / 3.0, 2.0 * q0 / 3.0 + q1 / 3.0, model);
    const double k3 = rcr_rhs(pi - k1 * h / 3.0 + k2 * h, q0 / 3.0 + 2.0 * q1 / 3.0, model);
    const double k4 = rcr_rhs(pi + k1 * h - k2 * h + k3 * h, q1, model);
    pi += (k1 + 3.0 * k2 + 3.0 * k3 + k4) * h / 8.0;
  }
  const double t_np1 = t_n + dt;
  return {model.proximal_resistance * q_np1 + pi + model.distal_pressure(t_np1), pi};
}

double analytic_pressure(const Windkessel& model, const std::function<double(double)>& flow,
                         std::span<const double> breakpoints, double t, double p0) {
  if (t < 0.0) throw ConfigError("analytic_pressure: negative time");
  const double tau = model.distal_resistance * model.capacitance;
  const auto kernel = [&](double s) { return std::exp(-(t - s) / tau) * flow(s) / model.capacitance; };

  std::vector<double> nodes{0.0};
  for (double b : breakpoints) {
    if (b > 0.0 && b < t) nodes.push_back(b);
  }
  nodes.push_back(t);
  std::sort(nodes.begin(), nodes.end());

  // a tolerance near round-off never satisfies the error estimate and
  // subdivides to max depth
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  double convolution = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1] > nodes[i]) convolution += Quadrature::integrate(kernel, nodes[i], nodes[i + 1], 15, 1e-12);
  }
  const double homogeneous = std::exp(-t / tau) *
                             (p0 - model.proximal_resistance * flow(0.0) - model.distal_pressure(0.0));
  return convolution + model.proximal_resistance * flow(t) + model.distal_pressure(t) + homogeneous;
}

double analytic_pressure(const Windkessel& model, const Waveform& flow, double t, double p0) {
  return analytic_pressure(model, [&flow](double s) { return flow(s); }, flow.times(), t, p0);
}

double resistance_pressure(const Resistance& model, double flow, double t) {
  return model.resistance * flow + model.distal_pressure(t);
}

LumpedUpdate advance_outlet(const LumpedModel& model, double pi_n, double q_n, double q_np1, double t_n,
                            double dt, int n_ts) {
  if (const auto* w = std::get_if<Windkessel>(&model)) return rk4_advance(*w, pi_n, q_n, q_np1, t_n, dt, n_ts);
  return {resistance_pressure(std::get<Resistance>(model), q_np1, t_n + dt), 0.0};
}

double tangent_m(const LumpedModel& model, double pi_n, double q_n, double q_np1, double t_n, double dt,
                 int n_ts) {
  if (const auto* r = std::get_if<Resistance>(&model)) return r->resistance;
  const auto& w = std::get<Windkessel>(model);
  const double eps = std::max(kTangentEpsAbs, kTangentEpsRel * std::abs(q_np1));
  const double plus = rk4_advance(w, pi_n, q_n, q_np1 + 0.5 * eps, t_n, dt, n_ts).pressure;
  const double minus = rk4_advance(w, pi_n, q_n, q_np1 - 0.5 * eps, t_n, dt, n_ts).pressure;
  return (plus - minus) / eps;
}

double outlet_pressure(const LumpedModel& model, double pi, double flow, double t) {
  if (const auto* w = std::get_if<Windkessel>(&model)) {
    return w->proximal_resistance * flow + pi + w->distal_pressure(t);
  }
  return resistance_pressure(std::get<Resistance>(model), flow, t);
}

}  // namespace hemo
