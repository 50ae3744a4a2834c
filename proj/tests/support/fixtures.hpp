// Small meshes, random states and dense reference computations shared by the
// unit and acceptance tests. Everything here is written independently of the
// library internals; only public types are used.
#ifndef HEMO_TESTS_FIXTURES_HPP
#define HEMO_TESTS_FIXTURES_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hemo/assembly.hpp"
#include "hemo/config.hpp"
#include "hemo/generators.hpp"
#include "hemo/mesh.hpp"
#include "hemo/precond.hpp"

namespace hemo::testing {

inline Vector random_vector(Eigen::Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = u(gen);
  return x;
}

inline double rel_diff(const Vector& a, const Vector& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

/// {(0,0,0),(1,0,0),(0,1,0),(0,0,1)}: inlet on z = 0, outlet on the slanted
/// face, walls on x = 0 and y = 0.
inline Mesh reference_tet_mesh() {
  std::vector<Vec3> x{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  std::vector<FacetGroup> groups{{"inlet", FacetTag::inlet, {{0, 1, 2}}},
                                 {"outlet", FacetTag::outlet, {{1, 2, 3}}},
                                 {"wall", FacetTag::wall, {{0, 2, 3}, {0, 1, 3}}}};
  return Mesh(std::move(x), {{0, 1, 2, 3}}, std::move(groups));
}

/// Box with a Dirichlet inlet at x = 0 and a separate outlet on each of the
/// other five sides.
inline Mesh open_box_mesh(int nx, int ny, int nz, const Vec3& lengths = Vec3(1, 1, 1)) {
  SideGroups sides;
  sides.names = {"inlet", "out_x", "out_ym", "out_yp", "out_zm", "out_zp"};
  sides.tags = {FacetTag::inlet, FacetTag::outlet, FacetTag::outlet,
                FacetTag::outlet, FacetTag::outlet, FacetTag::outlet};
  return box_mesh(nx, ny, nz, lengths, sides);
}

/// Dense A = F + sum w a a^T, built here rather than through to_dense.
inline DenseMatrix dense_a(const BlockTangent& t) {
  DenseMatrix a = DenseMatrix(t.f);
  for (const RankOne& r : t.rank_ones) a += r.weight * r.a * r.a.transpose();
  return a;
}

inline DenseMatrix dense_block(const BlockTangent& t) {
  const Eigen::Index nv = t.num_velocity(), np = t.num_pressure();
  DenseMatrix k(nv + np, nv + np);
  k.topLeftCorner(nv, nv) = dense_a(t);
  k.topRightCorner(nv, np) = DenseMatrix(t.b);
  k.bottomLeftCorner(np, nv) = DenseMatrix(t.c);
  k.bottomRightCorner(np, np) = DenseMatrix(t.d);
  return k;
}

/// S = D - C A^-1 B by dense LU.
inline DenseMatrix dense_schur(const BlockTangent& t) {
  const DenseMatrix a = dense_a(t);
  const DenseMatrix ainv_b = a.fullPivLu().solve(DenseMatrix(t.b));
  return DenseMatrix(t.d) - DenseMatrix(t.c) * ainv_b;
}

/// Tangent of a random state on a small mesh, with every outlet carrying a
/// rank-one term.
struct TangentFixture {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<Assembler> assembler;
  FlowState y;
  FlowState ydot;
  std::vector<double> m;
  GenAlphaParams ga;
  double dt = 0.01;
  BlockTangent tangent;
};

inline FlowState random_state(std::size_t nodes, std::uint64_t seed, double v_scale, double p_scale) {
  const auto n = static_cast<Eigen::Index>(nodes);
  return {v_scale * random_vector(3 * n, seed), p_scale * random_vector(n, seed + 1)};
}

inline TangentFixture make_tangent_fixture(Mesh mesh, std::uint64_t seed, double m_value = 500.0,
                                           FlowParams params = {}, double v_scale = 1.0, double dt = 0.01) {
  TangentFixture f;
  f.mesh = std::make_unique<Mesh>(std::move(mesh));
  f.assembler = std::make_unique<Assembler>(*f.mesh, DofMap(*f.mesh), std::move(params));
  f.dt = dt;
  f.y = random_state(f.mesh->num_nodes(), seed, v_scale, 10.0);
  f.ydot = random_state(f.mesh->num_nodes(), seed + 7, 5.0 * v_scale, 0.0);
  f.ga = GenAlphaParams{};
  f.m.assign(f.assembler->num_outlets(), 0.0);
  for (std::size_t k = 0; k < f.m.size(); ++k) f.m[k] = m_value * double(k + 1);
  f.tangent = f.assembler->tangent(f.y, f.ydot, f.m, f.dt, 0.0, f.ga);
  return f;
}

/// Residual of the fixture after a rate increment d = [d_v; d_p], with the
/// outlet pressures following P = P0 + m Q as a resistance would:
/// y += alpha_f gamma dt d, ydot += alpha_m d, P += alpha_f gamma dt m (a . d_v).
inline Vector perturbed_residual(const TangentFixture& f, const std::vector<double>& p0, const Vector& d) {
  const Assembler& as = *f.assembler;
  const DofMap& dofs = as.dofs();
  const double sy = f.ga.alpha_f * f.ga.gamma * f.dt;
  const Vector dv = d.head(dofs.num_velocity());
  const Vector dp = d.tail(dofs.num_pressure());
  FlowState y = f.y, yd = f.ydot;
  dofs.add_velocity(sy * dv, y.v);
  dofs.add_velocity(f.ga.alpha_m * dv, yd.v);
  y.p += sy * dp;
  yd.p += f.ga.alpha_m * dp;
  std::vector<OutletLoad> loads(as.num_outlets());
  for (std::size_t k = 0; k < loads.size(); ++k) loads[k].pressure = p0[k] + sy * f.m[k] * as.outlet_weights(k).dot(dv);
  return as.residual(y, yd, loads, f.dt, 0.0).stacked();
}

/// ||T d - (R(eps d) - R(-eps d)) / (2 eps)|| / ||T d||
inline double central_difference_error(const TangentFixture& f, const std::vector<double>& p0, const Vector& d,
                                       double eps) {
  const Vector td = apply_block(f.tangent, d);
  const Vector fd = (perturbed_residual(f, p0, eps * d) - perturbed_residual(f, p0, -eps * d)) / (2.0 * eps);
  return (td - fd).norm() / td.norm();
}

/// Settings that make every nested solve effectively exact.
inline NestedSettings exact_nested(APrecond pa = APrecond::jacobi, SPrecond ps = SPrecond::ilu0) {
  NestedSettings s;
  s.a = SolverSettings{1000, 1e-12, 1e-50, 1000};
  s.s = SolverSettings{1000, 1e-12, 1e-50, 1000};
  s.inner = SolverSettings{1000, 1e-12, 1e-50, 1000};
  s.pa = pa;
  s.ps = ps;
  return s;
}

/// 5-point Laplacian on an n x n interior grid.
inline SparseMatrix poisson_2d(int n) {
  std::vector<Eigen::Triplet<double>> trip;
  const auto id = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      trip.emplace_back(id(i, j), id(i, j), 4.0);
      if (i > 0) trip.emplace_back(id(i, j), id(i - 1, j), -1.0);
      if (i + 1 < n) trip.emplace_back(id(i, j), id(i + 1, j), -1.0);
      if (j > 0) trip.emplace_back(id(i, j), id(i, j - 1), -1.0);
      if (j + 1 < n) trip.emplace_back(id(i, j), id(i, j + 1), -1.0);
    }
  }
  SparseMatrix a(n * n, n * n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

/// Coarse pipe with a resistance outlet and a parabolic inflow ramped up over
/// half a second (an impulsive start at Courant 1 can throw Newton off).
inline SimulationConfig small_pipe_config(const std::string& generator, int n_cross, int n_axial, double flow,
                                          double resistance) {
  SimulationConfig cfg;
  cfg.mesh.generator = generator;
  cfg.mesh.n_cross = n_cross;
  cfg.mesh.n_axial = n_axial;
  cfg.inflow.flow = Waveform::ramped(flow, 0.5);
  OutletConfig out;
  out.group = "outlet";
  out.model = Resistance{resistance, Waveform(0.0)};
  cfg.outlets.push_back(out);
  cfg.linear.direct = true;
  cfg.bench.warmup_steps = 2;
  return cfg;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hemo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hemo::testing

#endif  // HEMO_TESTS_FIXTURES_HPP
