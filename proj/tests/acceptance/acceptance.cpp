// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "hemo/bench.hpp"
#include "hemo/krylov.hpp"
#include "hemo/lumped.hpp"
#include "hemo/mms.hpp"
#include "hemo/simulation.hpp"
#include "hemo/timestep.hpp"

using namespace hemo;
using namespace hemo::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string what) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "[x] ") + std::move(what));
  }
};

double order(double coarse, double fine) { return std::log2(coarse / fine); }

// ---------------------------------------------------------------------------
// 1: RK4 against the closed-form Windkessel response

Outcome windkessel_oracle() {
  Outcome o;
  const Windkessel wk{100.0, 1e-4, 1233.0, Waveform(0.0)};
  const double tau = wk.distal_resistance * wk.capacitance;
  const double pi0 = 2000.0;
  const int outer = 8;
  const double dt = tau / outer;

  // closed form for constant Q, independent of the quadrature
  {
    const double q = 80.0;
    const double t = 0.7 * tau;
    const double exact = wk.proximal_resistance * q + q * wk.distal_resistance +
                         (pi0 - q * wk.distal_resistance) * std::exp(-t / tau);
    const double quad = analytic_pressure(wk, Waveform(q), t, wk.proximal_resistance * q + pi0);
    o.check(std::abs(quad - exact) < 1e-9 * exact, fmt::format("quadrature vs closed form {:.2e}", std::abs(quad - exact)));
  }

  const auto sweep = [&](const std::string& label, const std::function<double(double)>& q) {
    std::vector<double> times, values;
    for (int k = 0; k <= outer; ++k) {
      times.push_back(k * dt);
      values.push_back(q(k * dt));
    }
    // RK4 interpolates Q linearly inside each outer step, so the oracle sees
    // the same piecewise-linear history
    const Waveform table = Waveform::table(times, values);
    const double p0 = wk.proximal_resistance * values[0] + pi0;
    std::vector<double> err;
    for (int n_ts : {5, 10, 20, 40}) {
      double pi = pi0, worst = 0.0;
      for (int k = 0; k < outer; ++k) {
        const LumpedUpdate u = rk4_advance(wk, pi, values[k], values[k + 1], times[k], dt, n_ts);
        pi = u.pi;
        const double ref = analytic_pressure(wk, table, times[k + 1], p0);
        worst = std::max(worst, std::abs(u.pressure - ref));
      }
      err.push_back(worst);
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
      const double p = order(err[i], err[i + 1]);
      o.check(p >= 3.7 && p <= 4.3, fmt::format("{} n_ts {}->{} err {:.3e}->{:.3e} order {:.3f}", label, 5 << i,
                                                10 << i, err[i], err[i + 1], p));
    }
  };
  sweep("constant", [](double) { return 80.0; });
  sweep("sinusoid", [tau](double t) { return 80.0 + 40.0 * std::sin(2.0 * std::numbers::pi * t / tau); });
  return o;
}

// ---------------------------------------------------------------------------
// 2: steady outlet pressure of the resistance pipe

Outcome resistance_pressure_check() {
  Outcome o;
  SimulationConfig cfg = load_config(std::filesystem::path(HEMO_SOURCE_DIR) / "configs/cylinder_resistance.ini");
  const Simulation probe(cfg);
  // past the inflow ramp plus a few transit times of the resulting flow
  cfg.steps = static_cast<int>(std::ceil(1.0 / probe.dt()));
  RunOptions opt;
  opt.deterministic = true;
  opt.output_dir = scratch_dir("acceptance_resistance");
  const RunSummary s = run_simulation(cfg, opt);
  const double p = s.final_state.pressure.at(0);
  const double target = 1333.0 * 100.0;
  o.check(s.unconverged_steps == 0, fmt::format("{} steps, dt {:.4g}, unconverged {}", s.steps, s.dt, s.unconverged_steps));
  o.check(std::abs(p - target) <= 0.01 * target,
          fmt::format("P = {:.2f} (target {:.0f}, rel {:.2e}), Q = {:.4f}", p, target, std::abs(p - target) / target,
                      s.final_state.flow.at(0)));
  return o;
}

// ---------------------------------------------------------------------------
// 3: matrix-free Schur action against dense D - C A^-1 B

Outcome schur_oracle() {
  Outcome o;
  const TangentFixture f = make_tangent_fixture(open_box_mesh(4, 3, 3), 5, 400.0);
  const auto n = f.tangent.size();
  o.check(n <= 300, fmt::format("{} unknowns", n));
  NestedSettings ns = exact_nested();
  const SchurContext ctx(f.tangent, ns);
  const DenseMatrix s = dense_schur(f.tangent);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Vector x = random_vector(f.tangent.num_pressure(), 700 + k);
    worst = std::max(worst, rel_diff(schur_apply(ctx, x), Vector(s * x)));
  }
  o.check(worst < 1e-8, fmt::format("max relative difference {:.2e} over 10 vectors", worst));
  return o;
}

// ---------------------------------------------------------------------------
// 4: SCR exactness and inexact iteration counts

Outcome scr_exactness() {
  Outcome o;
  const auto run = [&](const std::string& label, const BlockTangent& t, const Vector& rhs, const NestedSettings& ns,
                       int cap) {
    LinearSolverConfig cfg;
    cfg.nested = ns;
    const LinearSolveReport r = solve_block_system(t, rhs, cfg);
    o.check(r.outer.converged && r.outer.iterations <= cap,
            fmt::format("{} ({} unknowns): {} outer iterations, rel {:.1e}", label, t.size(), r.outer.iterations,
                        r.outer.relative_residual));
  };
  {
    const TangentFixture f = make_tangent_fixture(open_box_mesh(4, 1, 1, Vec3(2, 0.5, 0.5)), 31, 300.0);
    run("box 4x1x1", f.tangent, random_vector(f.tangent.size(), 1), exact_nested(), 2);
  }
  {
    const TangentFixture f = make_tangent_fixture(open_box_mesh(4, 3, 3), 5, 400.0);
    run("box 4x3x3", f.tangent, random_vector(f.tangent.size(), 2), exact_nested(), 2);
  }
  {
    const FrozenSystem sys = freeze_system(small_pipe_config("cylinder", 2, 4, 100.0, 1333.0), 1333.0);
    run("frozen cylinder", sys.tangent, sys.rhs, exact_nested(), 2);
  }
  {
    const FrozenSystem sys = freeze_system(small_pipe_config("nozzle", 2, 12, 10.0, 1333.0), 1333.0);
    run("frozen nozzle", sys.tangent, sys.rhs, exact_nested(), 2);
  }
  {
    const FrozenSystem sys = freeze_system(small_pipe_config("nozzle", 4, 30, 10.0, 1333.0), 1333.0);
    NestedSettings ns;
    ns.a.rtol = ns.s.rtol = ns.inner.rtol = 1e-2;
    run("frozen nozzle 4x30 at 1e-2", sys.tangent, sys.rhs, ns, 10);
  }
  return o;
}

// ---------------------------------------------------------------------------
// 5: converge/stagnate pattern against the outlet resistance

Outcome robustness_vs_resistance() {
  Outcome o;
  const SimulationConfig cfg = load_config(std::filesystem::path(HEMO_SOURCE_DIR) / "configs/bench_cylinder.ini");
  BenchOptions opt;
  opt.deterministic = true;
  opt.output_dir = scratch_dir("acceptance_bench");
  const std::vector<BenchCase> cases = benchmark_preconditioners(cfg, opt);
  const auto find = [&](double r, BlockPrecond p, double tol) -> const BenchCase& {
    for (const auto& c : cases) {
      if (c.resistance == r && c.precond == p && (p != BlockPrecond::scr || c.inner_rtol == tol)) return c;
    }
    throw Error("missing bench case");
  };
  for (double r : cfg.bench.resistances) {
    const BenchCase& c = find(r, BlockPrecond::scr, 1e-1);
    o.check(c.report.outer.converged, fmt::format("SCR dI=1e-1 R={:g}: {} iterations, rel {:.1e}", r,
                                                  c.report.outer.iterations, c.report.outer.relative_residual));
  }
  const BenchCase& s2 = find(1e2, BlockPrecond::simple, 0.0);
  const BenchCase& s5 = find(1e5, BlockPrecond::simple, 0.0);
  o.check(s2.report.outer.converged, fmt::format("SIMPLE R=1e2 converges: {} iterations, rel {:.1e}",
                                                 s2.report.outer.iterations, s2.report.outer.relative_residual));
  o.check(!s5.report.outer.converged, fmt::format("SIMPLE R=1e5 fails to converge: {} iterations, rel {:.1e}",
                                                  s5.report.outer.iterations, s5.report.outer.relative_residual));
  for (double r : cfg.bench.resistances) {
    std::string counts;
    bool monotone = true;
    int prev = -1;
    for (double tol : cfg.bench.inner_tolerances) {
      const int its = find(r, BlockPrecond::scr, tol).report.outer.iterations;
      counts += fmt::format(" {}", its);
      if (prev >= 0 && its > prev) monotone = false;
      prev = its;
    }
    o.check(monotone, fmt::format("SCR iterations non-increasing as dI tightens, R={:g}:{}", r, counts));
  }
  return o;
}

// ---------------------------------------------------------------------------
// 6: second order in time

Outcome temporal_accuracy() {
  Outcome o;
  const SimulationConfig cfg = load_config(std::filesystem::path(HEMO_SOURCE_DIR) / "configs/mms.ini");
  o.check(cfg.rho_inf == 0.5, fmt::format("rho_inf {}", cfg.rho_inf));
  const MmsStudy s = temporal_study(cfg, linear_transient_solution());
  int failures = 0;
  for (const auto& c : s.cases) failures += c.newton_failures;
  o.check(failures == 0, fmt::format("{} Newton failures", failures));
  for (std::size_t i = 0; i < s.velocity_order.size(); ++i) {
    const double pv = s.velocity_order[i], pp = s.pressure_order[i];
    o.check(pv >= 1.8 && pv <= 2.2 && pp >= 1.8 && pp <= 2.2,
            fmt::format("steps {}->{}: order v {:.3f}, p {:.3f}", s.cases[i].steps, s.cases[i + 1].steps, pv, pp));
  }
  return o;
}

// ---------------------------------------------------------------------------
// 7: tangent against central differences of the residual

Outcome tangent_consistency() {
  Outcome o;
  // backflow switches are evaluated at the unperturbed state on both sides
  // of the difference, matching how the tangent freezes them
  o.notes.push_back("frozen backflow switch, outlet pressures follow P0 + m Q");
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    TangentFixture f = make_tangent_fixture(open_box_mesh(2, 1, 1), seed, 800.0, FlowParams{}, 10.0, 0.1);
    o.check(f.mesh->num_nodes() <= 50, fmt::format("{} nodes", f.mesh->num_nodes()));
    const std::vector<double> p0(f.assembler->num_outlets(), 50.0);
    const Vector d = random_vector(f.tangent.size(), 99 + seed);
    std::vector<double> err;
    for (double eps : {0.4, 0.2, 0.1}) err.push_back(central_difference_error(f, p0, d, eps));
    const double p1 = order(err[0], err[1]), p2 = order(err[1], err[2]);
    o.check(p1 >= 1.8 && p1 <= 2.2 && p2 >= 1.8 && p2 <= 2.2,
            fmt::format("seed {}: errors {:.2e} {:.2e} {:.2e}, orders {:.3f} {:.3f}", seed, err[0], err[1], err[2],
                        p1, p2));
  }
  return o;
}

// ---------------------------------------------------------------------------
// 8: invariance and property suite

Outcome invariance_suite() {
  Outcome o;
  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Vector r = random_vector(12, 900 + seed);
      std::array<Vec3, 4> x{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
      for (int i = 0; i < 4; ++i) x[i] += 0.25 * r.segment<3>(3 * i);
      if (signed_volume(x) <= 0.0) std::swap(x[2], x[3]);
      const Mat3 g0 = metric_tensor(x).g;
      std::array<int, 4> perm{0, 1, 2, 3};
      do {
        std::array<Vec3, 4> y;
        for (int i = 0; i < 4; ++i) y[i] = x[perm[i]];
        if (signed_volume(y) <= 0.0) continue;
        worst = std::max(worst, (metric_tensor(y).g - g0).norm() / g0.norm());
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    o.check(worst < 1e-12, fmt::format("metric permutation invariance {:.1e}", worst));
  }
  {
    double worst = 0.0;
    for (const Mesh& m : {nozzle_mesh(4, 10), cylinder_mesh(2.0, 5.0, 4, 5)}) {
      for (const char* name : {"inlet", "outlet"}) {
        const std::size_t g = m.group_index(name);
        Vec3 sum = Vec3::Zero(), area_vector = Vec3::Zero();
        for (const Vec3& a : surface_normal_weights(m, g).weights) sum += a;
        for (const auto& tri : m.groups()[g].triangles) area_vector += 0.5 * triangle_area_normal(m, tri);
        worst = std::max(worst, (sum - area_vector).norm() / area_vector.norm());
      }
    }
    o.check(worst < 1e-12, fmt::format("outlet weights sum to the area vector {:.1e}", worst));
  }
  {
    double worst = 0.0;
    const double gamma = genalpha_params(0.5).gamma, dt = 0.013;
    const FlowState y0 = random_state(30, 1, 1.0, 1.0), yd0 = random_state(30, 2, 3.0, 3.0);
    auto [y, yd] = predictor(y0, yd0, gamma);
    worst = std::max(worst, update_rule_residual(y0, yd0, y, yd, gamma, dt));
    for (int l = 0; l < 10; ++l) {
      corrector_update(y, yd, random_state(30, 10 + l, 2.0, 2.0), gamma, dt);
      worst = std::max(worst, update_rule_residual(y0, yd0, y, yd, gamma, dt));
    }
    // and on accepted steps of a real run
    SimulationConfig cfg = small_pipe_config("cylinder", 2, 4, 100.0, 1333.0);
    const Simulation sim(cfg);
    KinematicState s = sim.initial_state();
    for (int i = 0; i < 5; ++i) {
      const KinematicState before = s;
      advance_step(sim.problem(), s, sim.dt());
      worst = std::max(worst, update_rule_residual(before.y, before.ydot, s.y, s.ydot, sim.problem().ga.gamma, sim.dt()));
    }
    o.check(worst < 1e-13, fmt::format("update rule after correctors {:.1e}", worst));
  }
  {
    bool monotone = true, finite = true;
    for (int n : {5, 20, 50}) {
      DenseMatrix a = DenseMatrix::Identity(n, n) * 4.0;
      for (int i = 0; i < n; ++i) a.row(i) += random_vector(n, 50 + n + i).transpose();
      const Vector b = random_vector(n, 7);
      SolverSettings st{n, 1e-12, 1e-50, n};
      for (PreconditionSide side : {PreconditionSide::left, PreconditionSide::right}) {
        const SolveResult r = gmres(as_operator(a), as_operator(DenseMatrix(DenseMatrix::Identity(n, n))), b,
                                    Vector::Zero(n), st, side);
        finite = finite && r.stats.converged && r.stats.iterations <= n;
        const auto& h = r.stats.history;
        for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] <= h[i - 1] * (1 + 1e-12);
      }
    }
    o.check(monotone, "GMRES residual history non-increasing");
    o.check(finite, "GMRES terminates within n iterations");
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"windkessel RK4 order", windkessel_oracle},
      {"resistance steady pressure", resistance_pressure_check},
      {"Schur action vs dense", schur_oracle},
      {"SCR exactness", scr_exactness},
      {"robustness vs resistance", robustness_vs_resistance},
      {"temporal order", temporal_accuracy},
      {"tangent consistency", tangent_consistency},
      {"invariance suite", invariance_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.pass ? 0 : 1;
    std::printf("CRITERION %zu %s  %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  return failed;
}
