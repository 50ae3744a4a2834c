#include "hemo/precond.hpp"

#include <Eigen/SparseLU>
#include <string>

namespace hemo {

APrecond parse_a_precond(std::string_view text) {
  if (text == "jacobi") return APrecond::jacobi;
  if (text == "ilu0") return APrecond::ilu0;
  if (text == "none") return APrecond::none;
  throw ConfigError("unknown A preconditioner '" + std::string(text) + "'");
}

SPrecond parse_s_precond(std::string_view text) {
  if (text == "ilu0") return SPrecond::ilu0;
  if (text == "jacobi") return SPrecond::jacobi;
  if (text == "bipn") return SPrecond::bipn;
  if (text == "none") return SPrecond::none;
  throw ConfigError("unknown Schur preconditioner '" + std::string(text) + "'");
}

BlockPrecond parse_block_precond(std::string_view text) {
  if (text == "scr") return BlockPrecond::scr;
  if (text == "simple") return BlockPrecond::simple;
  if (text == "block_diag") return BlockPrecond::block_diag;
  if (text == "none") return BlockPrecond::none;
  throw ConfigError("unknown block preconditioner '" + std::string(text) + "'");
}

std::string_view to_string(BlockPrecond p) {
  switch (p) {
    case BlockPrecond::scr:
      return "scr";
    case BlockPrecond::simple:
      return "simple";
    case BlockPrecond::block_diag:
      return "block_diag";
    case BlockPrecond::none:
      return "none";
  }
  return "?";
}

void NestedSettings::validate() const {
  a.validate();
  s.validate();
  inner.validate();
}

void SubSolveStats::record_a(const SolveStats& s) {
  ++a_solves;
  a_iterations += s.iterations;
  if (!s.converged) ++unconverged;
}

void SubSolveStats::record_s(const SolveStats& s) {
  ++s_solves;
  s_iterations += s.iterations;
  if (!s.converged) ++unconverged;
}

void SubSolveStats::record_inner(const SolveStats& s) {
  ++inner_solves;
  inner_iterations += s.iterations;
  if (!s.converged) ++unconverged;
}

namespace {

Vector checked_inverse(const Vector& d, const char* what) {
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) throw SolverError(std::string(what) + ": zero diagonal entry in A");
  }
  return d.cwiseInverse();
}

SparseMatrix diagonal_product(const SparseMatrix& c, const Vector& inv, const SparseMatrix& b) {
  SparseMatrix scaled = inv.asDiagonal() * b;
  SparseMatrix prod = c * scaled;
  return prod;
}

}  // namespace

SparseMatrix schur_sparse_approx(const BlockTangent& t) {
  const Vector inv = checked_inverse(t.diagonal_a(), "schur_sparse_approx");
  SparseMatrix s = t.d - diagonal_product(t.c, inv, t.b);
  s.makeCompressed();
  return s;
}

void BipnSchur::apply(const Vector& x, Vector& y) const {
  y.noalias() = base * x;
  for (std::size_t k = 0; k < coef.size(); ++k) y += (coef[k] * right[k].dot(x)) * left[k];
}

DenseMatrix BipnSchur::to_dense() const {
  DenseMatrix m = DenseMatrix(base);
  for (std::size_t k = 0; k < coef.size(); ++k) m += coef[k] * left[k] * right[k].transpose();
  return m;
}

BipnSchur bipn_schur(const BlockTangent& t) {
  const Vector inv = checked_inverse(Vector(t.f.diagonal()), "bipn_schur");
  BipnSchur out;
  out.base = t.d - diagonal_product(t.c, inv, t.b);
  out.base.makeCompressed();
  for (const RankOne& r : t.rank_ones) {
    const Vector bk = inv.cwiseProduct(r.a);
    out.coef.push_back(r.weight / (1.0 + r.weight * r.a.dot(bk)));
    out.left.push_back(t.c * bk);
    out.right.push_back(t.b.transpose() * bk);
  }
  return out;
}

SchurContext::SchurContext(const BlockTangent& t, NestedSettings settings)
    : t_(&t), settings_(std::move(settings)) {
  settings_.validate();
  diag_a_ = t.diagonal_a();
  a_op_ = [this](const Vector& x, Vector& y) { t_->apply_a(x, y); };

  switch (settings_.pa) {
    case APrecond::jacobi:
      pa_jacobi_ = std::make_unique<JacobiPreconditioner>(diag_a_);
      pa_op_ = pa_jacobi_->as_operator();
      break;
    case APrecond::ilu0: {
      // F with the rank-one diagonal folded in
      SparseMatrix f = t.f;
      const Vector extra = diag_a_ - Vector(t.f.diagonal());
      for (Eigen::Index i = 0; i < extra.size(); ++i) {
        if (extra(i) != 0.0) f.coeffRef(i, i) += extra(i);
      }
      pa_ilu_ = std::make_unique<Ilu0Preconditioner>(f);
      pa_op_ = pa_ilu_->as_operator();
      break;
    }
    case APrecond::none:
      break;
  }

  s_hat_ = schur_sparse_approx(t);
  switch (settings_.ps) {
    case SPrecond::ilu0:
      ps_ilu_ = std::make_unique<Ilu0Preconditioner>(s_hat_);
      ps_op_ = ps_ilu_->as_operator();
      break;
    case SPrecond::jacobi:
      ps_jacobi_ = std::make_unique<JacobiPreconditioner>(s_hat_);
      ps_op_ = ps_jacobi_->as_operator();
      break;
    case SPrecond::bipn: {
      const BipnSchur st = bipn_schur(t);
      bipn_ilu_ = std::make_unique<Ilu0Preconditioner>(st.base);
      std::vector<std::size_t> keep;
      for (std::size_t k = 0; k < st.coef.size(); ++k) {
        if (st.coef[k] != 0.0) keep.push_back(k);
      }
      const auto np = st.base.rows();
      const auto m = static_cast<Eigen::Index>(keep.size());
      bipn_z_.resize(np, m);
      bipn_w_.resize(np, m);
      DenseMatrix cap = DenseMatrix::Zero(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const std::size_t k = keep[static_cast<std::size_t>(j)];
        Vector z;
        bipn_ilu_->apply(st.left[k], z);
        bipn_z_.col(j) = z;
        bipn_w_.col(j) = st.right[k];
        cap(j, j) = 1.0 / st.coef[k];
      }
      cap += bipn_w_.transpose() * bipn_z_;
      if (m > 0) bipn_cap_.compute(cap);
      ps_op_ = [this, m](const Vector& x, Vector& y) {
        bipn_ilu_->apply(x, y);
        if (m == 0) return;
        const Vector c = bipn_cap_.solve(bipn_w_.transpose() * y);
        y.noalias() -= bipn_z_ * c;
      };
      break;
    }
    case SPrecond::none:
      break;
  }
}

SolveResult SchurContext::solve_a(const Vector& b, const SolverSettings& settings) const {
  return gmres(a_op_, pa_op_, b, Vector::Zero(b.size()), settings, PreconditionSide::left);
}

void SchurContext::schur_apply(const Vector& x, Vector& y) const {
  const Vector bx = t_->b * x;
  const SolveResult inner = solve_a(bx, settings_.inner);
  stats_.record_inner(inner.stats);
  last_inner_converged_ = inner.stats.converged;
  y.noalias() = t_->d * x;
  y.noalias() -= t_->c * inner.x;
}

SolveResult SchurContext::solve_s(const Vector& b) const {
  const LinearOperator op = [this](const Vector& x, Vector& y) { schur_apply(x, y); };
  return gmres(op, ps_op_, b, Vector::Zero(b.size()), settings_.s, PreconditionSide::left);
}

SolveResult SchurContext::solve_s_hat(const Vector& b) const {
  return gmres(as_operator(s_hat_), ps_op_, b, Vector::Zero(b.size()), settings_.s, PreconditionSide::left);
}

Vector schur_apply(const SchurContext& ctx, const Vector& x) {
  Vector y;
  ctx.schur_apply(x, y);
  return y;
}

namespace {

void check_size(const SchurContext& ctx, const Vector& s) {
  if (s.size() != ctx.tangent().size()) throw SolverError("block preconditioner: vector size mismatch");
}

}  // namespace

Vector scr_apply(const SchurContext& ctx, const Vector& s) {
  check_size(ctx, s);
  const BlockTangent& t = ctx.tangent();
  const Eigen::Index nv = t.num_velocity();
  const Eigen::Index np = t.num_pressure();
  auto& stats = ctx.stats();

  const SolveResult v_hat = ctx.solve_a(s.head(nv), ctx.settings().a);
  stats.record_a(v_hat.stats);
  const Vector sp = s.tail(np) - t.c * v_hat.x;
  const SolveResult p = ctx.solve_s(sp);
  stats.record_s(p.stats);
  const Vector sv = s.head(nv) - t.b * p.x;
  const SolveResult v = ctx.solve_a(sv, ctx.settings().a);
  stats.record_a(v.stats);

  Vector y(nv + np);
  y << v.x, p.x;
  return y;
}

Vector simple_apply(const SchurContext& ctx, const Vector& s) {
  check_size(ctx, s);
  const BlockTangent& t = ctx.tangent();
  const Eigen::Index nv = t.num_velocity();
  const Eigen::Index np = t.num_pressure();
  auto& stats = ctx.stats();

  const SolveResult v_hat = ctx.solve_a(s.head(nv), ctx.settings().a);
  stats.record_a(v_hat.stats);
  const Vector sp = s.tail(np) - t.c * v_hat.x;
  const SolveResult p = ctx.solve_s_hat(sp);
  stats.record_s(p.stats);
  const Vector bp = t.b * p.x;

  Vector y(nv + np);
  y << v_hat.x - bp.cwiseQuotient(ctx.a_diagonal()), p.x;
  return y;
}

Vector block_diag_apply(const SchurContext& ctx, const Vector& s) {
  check_size(ctx, s);
  const BlockTangent& t = ctx.tangent();
  const Eigen::Index nv = t.num_velocity();
  const Eigen::Index np = t.num_pressure();
  auto& stats = ctx.stats();

  const SolveResult v = ctx.solve_a(s.head(nv), ctx.settings().a);
  stats.record_a(v.stats);
  const SolveResult p = ctx.solve_s_hat(s.tail(np));
  stats.record_s(p.stats);

  Vector y(nv + np);
  y << v.x, p.x;
  return y;
}

LinearOperator block_preconditioner(const SchurContext& ctx, BlockPrecond kind) {
  switch (kind) {
    case BlockPrecond::scr:
      return [&ctx](const Vector& x, Vector& y) { y = scr_apply(ctx, x); };
    case BlockPrecond::simple:
      return [&ctx](const Vector& x, Vector& y) { y = simple_apply(ctx, x); };
    case BlockPrecond::block_diag:
      return [&ctx](const Vector& x, Vector& y) { y = block_diag_apply(ctx, x); };
    case BlockPrecond::none:
      break;
  }
  return {};
}

DenseMatrix simple_dense(const BlockTangent& t) {
  const Eigen::Index nv = t.num_velocity();
  const Eigen::Index np = t.num_pressure();
  const DenseMatrix a = t.dense_a();
  const Vector inv = checked_inverse(t.diagonal_a(), "simple_dense");
  DenseMatrix m(nv + np, nv + np);
  m.topLeftCorner(nv, nv) = a;
  m.topRightCorner(nv, np) = a * (inv.asDiagonal() * DenseMatrix(t.b));
  m.bottomLeftCorner(np, nv) = DenseMatrix(t.c);
  m.bottomRightCorner(np, np) = DenseMatrix(t.d);
  return m;
}

LinearSolveReport solve_block_system(const BlockTangent& t, const Vector& rhs, const LinearSolverConfig& config) {
  if (rhs.size() != t.size()) throw SolverError("solve_block_system: right-hand side size mismatch");
  LinearSolveReport report;
  if (config.direct) {
    const SparseMatrix m = t.to_sparse();
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> mc(m);
    Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>> lu;
    lu.compute(mc);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed");
    report.x = lu.solve(rhs);
    Vector res;
    t.apply(report.x, res);
    const double bn = rhs.norm();
    report.outer.iterations = 1;
    report.outer.relative_residual = bn > 0.0 ? (rhs - res).norm() / bn : 0.0;
    report.outer.converged = true;
    report.outer.history = {1.0, report.outer.relative_residual};
    return report;
  }

  const LinearOperator op = [&t](const Vector& x, Vector& y) { t.apply(x, y); };
  if (config.precond == BlockPrecond::none) {
    SolveResult r = fgmres(op, {}, rhs, Vector::Zero(rhs.size()), config.outer);
    report.x = std::move(r.x);
    report.outer = std::move(r.stats);
    return report;
  }
  const SchurContext ctx(t, config.nested);
  SolveResult r = fgmres(op, block_preconditioner(ctx, config.precond), rhs, Vector::Zero(rhs.size()), config.outer);
  report.x = std::move(r.x);
  report.outer = std::move(r.stats);
  report.sub = ctx.stats();
  return report;
}

}  // namespace hemo
