#include "hemo/assembly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <unsupported/Eigen/AutoDiff>

namespace hemo {

namespace {

// 4-point degree-2 rule on the tet (barycentric a, b, b, b and permutations).
constexpr double kTetA = 0.5854101966249685;
constexpr double kTetB = 0.1381966011250105;
// 3-point degree-2 rule on the triangle.
constexpr double kTriA = 2.0 / 3.0;
constexpr double kTriB = 1.0 / 6.0;

inline double tet_shape(int q, int a) { return q == a ? kTetA : kTetB; }
inline double tri_shape(int q, int a) { return q == a ? kTriA : kTriB; }

using Ad16 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 16, 1>>;
using Ad9 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;

inline double value_of(double x) { return x; }
template <class D>
inline double value_of(const Eigen::AutoDiffScalar<D>& x) {
  return x.value();
}

struct KernelGeometry {
  const Eigen::Matrix<double, 3, 4>* grad;
  const Mat3* g;
  double volume;
};

// Volume residual of one element. v and vdot hold 12 entries (node-major),
// p holds 4; out receives 16 entries and is accumulated into.
template <class T>
void volume_kernel(const KernelGeometry& geo, const T* v, const T* vdot, const T* p,
                   const std::array<Vec3, 4>& body, const FlowParams& fp, double dt, unsigned terms,
                   T* out) {
  using std::sqrt;
  const auto& dn = *geo.grad;
  const Mat3& g = *geo.g;
  const double rho = fp.density;
  const double mu = fp.viscosity;

  T gv[3][3];  // gv[i][j] = d v_i / d x_j
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      gv[i][j] = T(0.0);
      for (int a = 0; a < 4; ++a) gv[i][j] += v[3 * a + i] * dn(j, a);
    }
  }
  T gp[3];
  for (int i = 0; i < 3; ++i) {
    gp[i] = T(0.0);
    for (int a = 0; a < 4; ++a) gp[i] += p[a] * dn(i, a);
  }
  const T div = gv[0][0] + gv[1][1] + gv[2][2];
  const double gg = g.cwiseProduct(g).sum();
  const double trg = g.trace();
  const double wq = geo.volume / 4.0;

  for (int q = 0; q < 4; ++q) {
    T vq[3], vdq[3];
    for (int i = 0; i < 3; ++i) {
      vq[i] = T(0.0);
      vdq[i] = T(0.0);
      for (int a = 0; a < 4; ++a) {
        vq[i] += tet_shape(q, a) * v[3 * a + i];
        vdq[i] += tet_shape(q, a) * vdot[3 * a + i];
      }
    }
    T pq(0.0);
    for (int a = 0; a < 4; ++a) pq += tet_shape(q, a) * p[a];

    T conv[3];  // (grad v) v
    for (int i = 0; i < 3; ++i) conv[i] = gv[i][0] * vq[0] + gv[i][1] * vq[1] + gv[i][2] * vq[2];

    T vp[3] = {T(0.0), T(0.0), T(0.0)};
    T pp(0.0);
    if (fp.stabilization) {
      T vgv(0.0);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) vgv += vq[i] * g(i, j) * vq[j];
      }
      const double nu = mu / rho;
      const T denom = kStabCt / (dt * dt) + vgv + kStabCi * nu * nu * gg;
      const T tau_m = 1.0 / (rho * sqrt(denom));
      const T tau_c = 1.0 / (tau_m * trg);
      for (int i = 0; i < 3; ++i) {
        const T rm = rho * vdq[i] + rho * conv[i] + gp[i] - rho * body[q](i);
        vp[i] = -tau_m * rm;
      }
      pp = -tau_c * div;
    }

    for (int a = 0; a < 4; ++a) {
      const double na = tet_shape(q, a);
      for (int i = 0; i < 3; ++i) {
        T acc(0.0);
        if (terms & kTermInertia) acc += na * rho * vdq[i];
        if (terms & kTermConvection) acc += na * rho * conv[i];
        if (terms & kTermBodyForce) acc -= na * rho * body[q](i);
        if (terms & kTermPressure) acc -= dn(i, a) * pq;
        if (terms & kTermViscous) {
          for (int j = 0; j < 3; ++j) acc += mu * dn(j, a) * (gv[i][j] + gv[j][i]);
        }
        if (terms & kTermCross) {
          for (int j = 0; j < 3; ++j) acc -= rho * dn(j, a) * vp[i] * vq[j];
        }
        if (terms & kTermCrossAdjoint) {
          for (int j = 0; j < 3; ++j) acc += rho * na * gv[i][j] * vp[j];
        }
        if (terms & kTermReynolds) {
          for (int j = 0; j < 3; ++j) acc -= rho * dn(j, a) * vp[i] * vp[j];
        }
        if (terms & kTermGradDiv) acc -= dn(i, a) * pp;
        out[3 * a + i] += wq * acc;
      }
      T cont(0.0);
      if (terms & kTermContinuity) cont += na * div;
      if (terms & kTermPspg) {
        for (int j = 0; j < 3; ++j) cont -= dn(j, a) * vp[j];
      }
      out[12 + a] += wq * cont;
    }
  }
}

// -rho beta int (v.n)_- N_a v_i over one triangle; the switch follows the
// current value of v.n at each quadrature point.
template <class T>
void backflow_kernel(const Vec3& n, double area, const T* v, double rho, double beta, T* out) {
  const double wq = area / 3.0;
  for (int q = 0; q < 3; ++q) {
    T vq[3];
    for (int i = 0; i < 3; ++i) {
      vq[i] = T(0.0);
      for (int a = 0; a < 3; ++a) vq[i] += tri_shape(q, a) * v[3 * a + i];
    }
    const T vn = vq[0] * n(0) + vq[1] * n(1) + vq[2] * n(2);
    if (!(value_of(vn) < 0.0)) continue;
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 3; ++i) out[3 * a + i] -= wq * rho * beta * vn * tri_shape(q, a) * vq[i];
    }
  }
}

bool finite(const Vector& x) { return x.allFinite(); }

}  // namespace

StabParams stabilization_params(const Vec3& velocity, const MetricTensor& g, double dt, double density,
                                double viscosity) {
  const double nu = viscosity / density;
  const double denom =
      kStabCt / (dt * dt) + velocity.dot(g.g * velocity) + kStabCi * nu * nu * g.contract();
  StabParams out;
  out.tau_m = 1.0 / (density * std::sqrt(denom));
  out.tau_c = 1.0 / (out.tau_m * g.trace());
  return out;
}

FlowState FlowState::zero(std::size_t num_nodes) {
  const auto n = static_cast<Eigen::Index>(num_nodes);
  return {Vector::Zero(3 * n), Vector::Zero(n)};
}

DofMap::DofMap(const Mesh& mesh) {
  std::vector<std::size_t> groups = mesh.groups_with_tag(FacetTag::inlet);
  for (std::size_t g : mesh.groups_with_tag(FacetTag::wall)) groups.push_back(g);
  build(mesh, groups);
}

DofMap::DofMap(const Mesh& mesh, std::span<const std::size_t> dirichlet_groups) {
  build(mesh, dirichlet_groups);
}

void DofMap::build(const Mesh& mesh, std::span<const std::size_t> groups) {
  num_nodes_ = static_cast<int>(mesh.num_nodes());
  std::vector<char> fixed(mesh.num_nodes(), 0);
  for (std::size_t g : groups) {
    if (g >= mesh.groups().size()) throw MeshError("Dirichlet group index out of range");
    for (int node : mesh.group_nodes(g)) fixed[static_cast<std::size_t>(node)] = 1;
  }
  vel_.assign(3 * mesh.num_nodes(), -1);
  fixed_.clear();
  num_free_ = 0;
  for (int node = 0; node < num_nodes_; ++node) {
    if (fixed[static_cast<std::size_t>(node)]) {
      fixed_.push_back(node);
      continue;
    }
    for (int i = 0; i < 3; ++i) vel_[static_cast<std::size_t>(3 * node + i)] = num_free_++;
  }
}

Vector DofMap::restrict_velocity(const Vector& full) const {
  Vector out(num_free_);
  for (std::size_t k = 0; k < vel_.size(); ++k) {
    if (vel_[k] >= 0) out(vel_[k]) = full(static_cast<Eigen::Index>(k));
  }
  return out;
}

void DofMap::add_velocity(const Vector& free, Vector& full) const {
  for (std::size_t k = 0; k < vel_.size(); ++k) {
    if (vel_[k] >= 0) full(static_cast<Eigen::Index>(k)) += free(vel_[k]);
  }
}

double Residual::norm() const {
  return std::sqrt(momentum.squaredNorm() + continuity.squaredNorm());
}

Vector Residual::stacked() const {
  Vector out(momentum.size() + continuity.size());
  out << momentum, continuity;
  return out;
}

void BlockTangent::apply_a(const Vector& x, Vector& y) const {
  y.noalias() = f * x;
  for (const RankOne& r : rank_ones) y += (r.weight * r.a.dot(x)) * r.a;
}

Vector BlockTangent::diagonal_a() const {
  Vector d = f.diagonal();
  for (const RankOne& r : rank_ones) d += r.weight * r.a.cwiseAbs2();
  return d;
}

void BlockTangent::apply(const Vector& x, Vector& y) const {
  const Eigen::Index nv = num_velocity();
  const Eigen::Index np = num_pressure();
  if (x.size() != nv + np) throw SolverError("block apply: vector size mismatch");
  y.resize(nv + np);
  Vector yv(nv);
  apply_a(x.head(nv), yv);
  yv.noalias() += b * x.tail(np);
  y.head(nv) = yv;
  y.tail(np).noalias() = c * x.head(nv);
  y.tail(np).noalias() += d * x.tail(np);
}

DenseMatrix BlockTangent::dense_a() const {
  DenseMatrix a = DenseMatrix(f);
  for (const RankOne& r : rank_ones) a += r.weight * r.a * r.a.transpose();
  return a;
}

DenseMatrix BlockTangent::to_dense() const {
  const Eigen::Index nv = num_velocity();
  const Eigen::Index np = num_pressure();
  DenseMatrix m(nv + np, nv + np);
  m.topLeftCorner(nv, nv) = dense_a();
  m.topRightCorner(nv, np) = DenseMatrix(b);
  m.bottomLeftCorner(np, nv) = DenseMatrix(c);
  m.bottomRightCorner(np, np) = DenseMatrix(d);
  return m;
}

SparseMatrix BlockTangent::to_sparse() const {
  const Eigen::Index nv = num_velocity();
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(static_cast<std::size_t>(f.nonZeros() + b.nonZeros() + c.nonZeros() + d.nonZeros()));
  const auto add = [&trip](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
    for (int i = 0; i < m.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
        trip.emplace_back(static_cast<int>(r0 + it.row()), static_cast<int>(c0 + it.col()), it.value());
      }
    }
  };
  add(f, 0, 0);
  add(b, 0, nv);
  add(c, nv, 0);
  add(d, nv, nv);
  for (const RankOne& r : rank_ones) {
    std::vector<int> nz;
    for (Eigen::Index i = 0; i < r.a.size(); ++i) {
      if (r.a(i) != 0.0) nz.push_back(static_cast<int>(i));
    }
    for (int i : nz) {
      for (int j : nz) trip.emplace_back(i, j, r.weight * r.a(i) * r.a(j));
    }
  }
  SparseMatrix out(size(), size());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vector apply_block(const BlockTangent& t, const Vector& x) {
  Vector y;
  t.apply(x, y);
  return y;
}

Assembler::Assembler(const Mesh& mesh, DofMap dofs, FlowParams params)
    : mesh_(&mesh), dofs_(std::move(dofs)), params_(std::move(params)) {
  if (dofs_.num_nodes() != static_cast<int>(mesh.num_nodes())) {
    throw MeshError("dof map does not belong to this mesh");
  }
  if (!(params_.density > 0.0) || !(params_.viscosity >= 0.0)) {
    throw ConfigError("density must be positive and viscosity non-negative");
  }

  elements_.resize(mesh.num_tets());
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    Element& el = elements_[e];
    el.grad = mesh.shape_gradients(e);
    el.g = metric_tensor(mesh, e);
    el.volume = mesh.volume(e);
    const auto pts = mesh.tet_points(e);
    for (int q = 0; q < 4; ++q) {
      el.qp[static_cast<std::size_t>(q)] = Vec3::Zero();
      for (int a = 0; a < 4; ++a) el.qp[static_cast<std::size_t>(q)] += tet_shape(q, a) * pts[static_cast<std::size_t>(a)];
    }
  }

  outlets_ = mesh.groups_with_tag(FacetTag::outlet);
  for (std::size_t k = 0; k < outlets_.size(); ++k) {
    const FacetGroup& grp = mesh.groups()[outlets_[k]];
    for (const auto& tri : grp.triangles) {
      const Vec3 an = triangle_area_normal(mesh, tri);
      const double area = 0.5 * an.norm();
      faces_.push_back({tri, an.normalized(), area, k});
    }
    a_full_.push_back(surface_normal_weights(mesh, outlets_[k]).to_nodal(mesh.num_nodes()));
    a_free_.push_back(dofs_.restrict_velocity(a_full_.back()));
  }

  // sparsity patterns, values all zero
  using Trip = Eigen::Triplet<double, int>;
  std::vector<Trip> tf, tb, tc, td;
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const auto& tet = mesh.tet(e);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        td.emplace_back(tet[static_cast<std::size_t>(a)], tet[static_cast<std::size_t>(b)], 0.0);
        for (int i = 0; i < 3; ++i) {
          const int ra = dofs_.velocity(tet[static_cast<std::size_t>(a)], i);
          const int cb = dofs_.velocity(tet[static_cast<std::size_t>(b)], i);
          if (ra >= 0) tb.emplace_back(ra, tet[static_cast<std::size_t>(b)], 0.0);
          if (cb >= 0) tc.emplace_back(tet[static_cast<std::size_t>(a)], cb, 0.0);
          if (ra < 0) continue;
          for (int j = 0; j < 3; ++j) {
            const int cj = dofs_.velocity(tet[static_cast<std::size_t>(b)], j);
            if (cj >= 0) tf.emplace_back(ra, cj, 0.0);
          }
        }
      }
    }
  }
  const int nv = dofs_.num_velocity();
  const int np = dofs_.num_pressure();
  const auto build = [](SparseMatrix& m, int rows, int cols, const std::vector<Trip>& t) {
    m.resize(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
  };
  build(pattern_f_, nv, nv, tf);
  build(pattern_b_, nv, np, tb);
  build(pattern_c_, np, nv, tc);
  build(pattern_d_, np, np, td);
}

std::vector<double> Assembler::flow_rates(const Vector& v) const {
  std::vector<double> q(outlets_.size());
  for (std::size_t k = 0; k < outlets_.size(); ++k) q[k] = a_full_[k].dot(v);
  return q;
}

void Assembler::gather(std::size_t e, const FlowState& y, const FlowState& ydot, double* v, double* vdot,
                       double* p) const {
  const auto& tet = mesh_->tet(e);
  for (int a = 0; a < 4; ++a) {
    const int node = tet[static_cast<std::size_t>(a)];
    for (int i = 0; i < 3; ++i) {
      v[3 * a + i] = y.v(3 * node + i);
      vdot[3 * a + i] = ydot.v(3 * node + i);
    }
    p[a] = y.p(node);
  }
}

std::array<Vec3, 4> Assembler::body_at(std::size_t e, double time) const {
  std::array<Vec3, 4> b;
  for (std::size_t q = 0; q < 4; ++q) {
    b[q] = params_.body_force ? params_.body_force(elements_[e].qp[q], time) : Vec3::Zero();
  }
  return b;
}

ElementVector Assembler::element_residual(std::size_t e, const FlowState& y, const FlowState& ydot,
                                          double dt, double time, unsigned terms) const {
  double v[12], vd[12], p[4];
  gather(e, y, ydot, v, vd, p);
  ElementVector out = ElementVector::Zero();
  const Element& el = elements_[e];
  volume_kernel<double>({&el.grad, &el.g.g, el.volume}, v, vd, p, body_at(e, time), params_, dt, terms,
                        out.data());
  return out;
}

Residual Assembler::residual(const FlowState& y, const FlowState& ydot, std::span<const OutletLoad> loads,
                             double dt, double time) const {
  const auto nn = static_cast<Eigen::Index>(mesh_->num_nodes());
  if (y.v.size() != 3 * nn || y.p.size() != nn || ydot.v.size() != 3 * nn || ydot.p.size() != nn) {
    throw SolverError("residual: state size does not match the mesh");
  }
  if (loads.size() != outlets_.size()) {
    throw SolverError("residual: expected " + std::to_string(outlets_.size()) + " outlet loads, got " +
                      std::to_string(loads.size()));
  }
  if (!finite(y.v) || !finite(y.p) || !finite(ydot.v)) throw SolverError("residual: non-finite state");
  if (!(dt > 0.0)) throw SolverError("residual: time step must be positive");

  const int nv = dofs_.num_velocity();
  Residual r;
  r.volume = Vector::Zero(nv);
  r.boundary = Vector::Zero(nv);
  r.backflow = Vector::Zero(nv);
  r.continuity = Vector::Zero(nn);

  for (std::size_t e = 0; e < mesh_->num_tets(); ++e) {
    const ElementVector loc = element_residual(e, y, ydot, dt, time);
    const auto& tet = mesh_->tet(e);
    for (int a = 0; a < 4; ++a) {
      const int node = tet[static_cast<std::size_t>(a)];
      for (int i = 0; i < 3; ++i) {
        const int dof = dofs_.velocity(node, i);
        if (dof >= 0) r.volume(dof) += loc(3 * a + i);
      }
      r.continuity(node) += loc(12 + a);
    }
  }

  for (std::size_t k = 0; k < outlets_.size(); ++k) {
    if (loads[k].traction) continue;
    r.boundary += loads[k].pressure * a_free_[k];
  }
  for (const Face& f : faces_) {
    double v[9];
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 3; ++i) v[3 * a + i] = y.v(3 * f.nodes[static_cast<std::size_t>(a)] + i);
    }
    double out[9] = {};
    if (params_.backflow_beta != 0.0) {
      backflow_kernel<double>(f.unit_normal, f.area, v, params_.density, params_.backflow_beta, out);
    }
    double trac[9] = {};
    if (loads[f.outlet].traction) {
      std::array<Vec3, 3> x;
      for (int a = 0; a < 3; ++a) x[static_cast<std::size_t>(a)] = mesh_->node(f.nodes[static_cast<std::size_t>(a)]);
      for (int q = 0; q < 3; ++q) {
        Vec3 xq = Vec3::Zero();
        for (int a = 0; a < 3; ++a) xq += tri_shape(q, a) * x[static_cast<std::size_t>(a)];
        const Vec3 h = loads[f.outlet].traction(xq);
        for (int a = 0; a < 3; ++a) {
          for (int i = 0; i < 3; ++i) trac[3 * a + i] -= f.area / 3.0 * tri_shape(q, a) * h(i);
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 3; ++i) {
        const int dof = dofs_.velocity(f.nodes[static_cast<std::size_t>(a)], i);
        if (dof < 0) continue;
        r.backflow(dof) += out[3 * a + i];
        r.boundary(dof) += trac[3 * a + i];
      }
    }
  }

  r.momentum = r.volume + r.boundary + r.backflow;
  r.flow_rates = flow_rates(y.v);
  return r;
}

BlockTangent Assembler::tangent(const FlowState& y, const FlowState& ydot, std::span<const double> outlet_m,
                                double dt, double time, const GenAlphaParams& ga) const {
  if (outlet_m.size() != outlets_.size()) throw SolverError("tangent: one m value per outlet required");
  if (!finite(y.v) || !finite(y.p) || !finite(ydot.v)) throw SolverError("tangent: non-finite state");
  if (!(dt > 0.0)) throw SolverError("tangent: time step must be positive");
  const double s_y = ga.alpha_f * ga.gamma * dt;
  const double s_ydot = ga.alpha_m;

  BlockTangent t;
  t.f = pattern_f_;
  t.b = pattern_b_;
  t.c = pattern_c_;
  t.d = pattern_d_;
  t.f.coeffs().setZero();
  t.b.coeffs().setZero();
  t.c.coeffs().setZero();
  t.d.coeffs().setZero();

  for (std::size_t e = 0; e < mesh_->num_tets(); ++e) {
    double v0[12], vd0[12], p0[4];
    gather(e, y, ydot, v0, vd0, p0);
    Ad16 v[12], vd[12], p[4], out[16];
    for (int k = 0; k < 12; ++k) {
      v[k] = Ad16(v0[k], 16, k);
      v[k].derivatives()(k) = s_y;
      vd[k] = Ad16(vd0[k], 16, k);
      vd[k].derivatives()(k) = s_ydot;
    }
    for (int a = 0; a < 4; ++a) {
      p[a] = Ad16(p0[a], 16, 12 + a);
      p[a].derivatives()(12 + a) = s_y;
    }
    for (auto& o : out) o = Ad16(0.0);
    const Element& el = elements_[e];
    volume_kernel<Ad16>({&el.grad, &el.g.g, el.volume}, v, vd, p, body_at(e, time), params_, dt, kTermAll,
                        out);

    const auto& tet = mesh_->tet(e);
    for (int r = 0; r < 16; ++r) {
      const int rnode = tet[static_cast<std::size_t>(r < 12 ? r / 3 : r - 12)];
      const int row = r < 12 ? dofs_.velocity(rnode, r % 3) : rnode;
      if (row < 0) continue;
      const auto& der = out[r].derivatives();
      for (int c = 0; c < 16; ++c) {
        const int cnode = tet[static_cast<std::size_t>(c < 12 ? c / 3 : c - 12)];
        const int col = c < 12 ? dofs_.velocity(cnode, c % 3) : cnode;
        if (col < 0) continue;
        const double val = der(c);
        if (r < 12 && c < 12) {
          t.f.coeffRef(row, col) += val;
        } else if (r < 12) {
          t.b.coeffRef(row, col) += val;
        } else if (c < 12) {
          t.c.coeffRef(row, col) += val;
        } else {
          t.d.coeffRef(row, col) += val;
        }
      }
    }
  }

  if (params_.backflow_beta != 0.0) {
    for (const Face& f : faces_) {
      Ad9 v[9], out[9];
      for (int a = 0; a < 3; ++a) {
        for (int i = 0; i < 3; ++i) {
          const int k = 3 * a + i;
          v[k] = Ad9(y.v(3 * f.nodes[static_cast<std::size_t>(a)] + i), 9, k);
          v[k].derivatives()(k) = s_y;
          out[k] = Ad9(0.0);
        }
      }
      backflow_kernel<Ad9>(f.unit_normal, f.area, v, params_.density, params_.backflow_beta, out);
      for (int r = 0; r < 9; ++r) {
        const int row = dofs_.velocity(f.nodes[static_cast<std::size_t>(r / 3)], r % 3);
        if (row < 0) continue;
        for (int c = 0; c < 9; ++c) {
          const int col = dofs_.velocity(f.nodes[static_cast<std::size_t>(c / 3)], c % 3);
          if (col < 0) continue;
          const double val = out[r].derivatives()(c);
          if (val != 0.0) t.f.coeffRef(row, col) += val;
        }
      }
    }
  }

  for (std::size_t k = 0; k < outlets_.size(); ++k) {
    t.rank_ones.push_back({s_y * outlet_m[k], a_free_[k]});
  }
  return t;
}

Residual assemble_residual(const Assembler& assembler, const FlowState& y, const FlowState& ydot,
                           std::span<const OutletLoad> loads, double dt, double time) {
  return assembler.residual(y, ydot, loads, dt, time);
}

BlockTangent assemble_tangent(const Assembler& assembler, const FlowState& y, const FlowState& ydot,
                              std::span<const double> outlet_m, double dt, const GenAlphaParams& ga,
                              double time) {
  return assembler.tangent(y, ydot, outlet_m, dt, time, ga);
}

}  // namespace hemo
