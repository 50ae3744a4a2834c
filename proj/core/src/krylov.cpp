#include "hemo/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hemo {

namespace {

enum class Mode { left, right, flexible };

void apply_or_copy(const LinearOperator& op, const Vector& x, Vector& y) {
  if (op) {
    op(x, y);
  } else {
    y = x;
  }
}

void check_finite(double value, const char* where) {
  if (!std::isfinite(value)) throw SolverError(std::string(where) + ": non-finite residual");
}

// Plane rotation zeroing b in [a; b].
void make_rotation(double a, double b, double& c, double& s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (std::abs(b) > std::abs(a)) {
    const double t = a / b;
    s = 1.0 / std::sqrt(1.0 + t * t);
    c = s * t;
  } else {
    const double t = b / a;
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
  }
}

SolveResult solve(const LinearOperator& a, const LinearOperator& precond, const Vector& b,
                  const Vector& x0, const SolverSettings& settings, Mode mode) {
  settings.validate();
  const char* name = mode == Mode::flexible ? "fgmres" : "gmres";
  if (x0.size() != b.size()) throw SolverError(std::string(name) + ": x0 / b size mismatch");

  const Eigen::Index n = b.size();
  SolveResult out;
  out.x = x0;
  SolveStats& stats = out.stats;

  Vector r(n), w(n), tmp(n);
  double ref = 0.0;
  if (mode == Mode::left) {
    apply_or_copy(precond, b, tmp);
    ref = tmp.norm();
  } else {
    ref = b.norm();
  }
  check_finite(ref, name);
  if (ref == 0.0) {
    out.x.setZero();
    stats.relative_residual = 0.0;
    stats.converged = true;
    stats.history.push_back(0.0);
    return out;
  }
  const double target = std::max(settings.rtol * ref, settings.atol);

  const int m = settings.restart;
  const int cols = std::min(m, settings.max_iterations);
  // basis vectors are allocated on first use; most solves stop early
  std::vector<Vector> basis;
  std::vector<Vector> zbasis;
  basis.reserve(static_cast<std::size_t>(cols) + 1);
  DenseMatrix h(cols + 1, cols);
  Vector cs(cols), sn(cols), g(cols + 1);

  Vector best = out.x;
  double best_res = std::numeric_limits<double>::infinity();
  bool first = true;

  while (true) {
    // true (or left-preconditioned) residual at the current iterate
    a(out.x, tmp);
    r = b - tmp;
    if (mode == Mode::left) {
      apply_or_copy(precond, r, tmp);
      r = tmp;
    }
    const double beta = r.norm();
    check_finite(beta, name);
    if (first) {
      stats.history.push_back(beta / ref);
      first = false;
    }
    if (beta < best_res) {
      best_res = beta;
      best = out.x;
    }
    stats.relative_residual = beta / ref;
    if (beta <= target) {
      stats.converged = true;
      break;
    }
    if (stats.iterations >= settings.max_iterations || stats.stagnated) break;

    if (basis.empty()) basis.emplace_back(n);
    basis[0] = r / beta;
    g.setZero();
    g(0) = beta;
    int k = 0;
    for (int j = 0; j < cols && stats.iterations < settings.max_iterations; ++j) {
      if (mode == Mode::flexible && zbasis.size() <= static_cast<std::size_t>(j)) zbasis.emplace_back(n);
      switch (mode) {
        case Mode::left:
          a(basis[j], tmp);
          apply_or_copy(precond, tmp, w);
          break;
        case Mode::right:
          apply_or_copy(precond, basis[j], tmp);
          a(tmp, w);
          break;
        case Mode::flexible:
          apply_or_copy(precond, basis[j], zbasis[j]);
          a(zbasis[j], w);
          break;
      }
      // modified Gram-Schmidt, one extra pass when the norm drops sharply
      const double w_norm0 = w.norm();
      for (int i = 0; i <= j; ++i) {
        const double hij = basis[i].dot(w);
        h(i, j) = hij;
        w -= hij * basis[i];
      }
      if (w.norm() < w_norm0 / std::sqrt(2.0)) {
        for (int i = 0; i <= j; ++i) {
          const double c = basis[i].dot(w);
          h(i, j) += c;
          w -= c * basis[i];
        }
      }
      const double h_next = w.norm();
      h(j + 1, j) = h_next;

      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      make_rotation(h(j, j), h(j + 1, j), cs(j), sn(j));
      h(j, j) = cs(j) * h(j, j) + sn(j) * h(j + 1, j);
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      ++stats.iterations;
      k = j + 1;
      const double res = std::abs(g(j + 1));
      check_finite(res, name);
      stats.history.push_back(res / ref);
      if (res <= target || h_next <= 1e-14 * w_norm0) break;
      if (basis.size() <= static_cast<std::size_t>(j) + 1) basis.emplace_back(n);
      basis[j + 1] = w / h_next;
    }

    // back substitution on the k x k triangle
    Vector y = g.head(k);
    for (int i = k - 1; i >= 0; --i) {
      for (int l = i + 1; l < k; ++l) y(i) -= h(i, l) * y(l);
      y(i) /= h(i, i);
    }
    Vector update = Vector::Zero(n);
    if (mode == Mode::flexible) {
      for (int i = 0; i < k; ++i) update += y(i) * zbasis[i];
    } else {
      for (int i = 0; i < k; ++i) update += y(i) * basis[i];
      if (mode == Mode::right) {
        apply_or_copy(precond, update, tmp);
        update = tmp;
      }
    }
    out.x += update;

    if (mode == Mode::flexible && k == cols && std::abs(g(k)) >= beta * (1.0 - 1e-12)) {
      stats.stagnated = true;
    }
  }

  if (!stats.converged && best_res < stats.relative_residual * ref) {
    out.x = best;
    stats.relative_residual = best_res / ref;
  }
  return out;
}

}  // namespace

LinearOperator as_operator(const SparseMatrix& a) {
  return [&a](const Vector& x, Vector& y) { y.noalias() = a * x; };
}

LinearOperator as_operator(const DenseMatrix& a) {
  return [&a](const Vector& x, Vector& y) { y.noalias() = a * x; };
}

void SolverSettings::validate() const {
  if (restart < 1) throw SolverError("restart length must be at least 1");
  if (max_iterations < 1) throw SolverError("iteration cap must be at least 1");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw SolverError("solver tolerances must be positive");
}

SolveResult gmres(const LinearOperator& a, const LinearOperator& precond, const Vector& b,
                  const Vector& x0, const SolverSettings& settings, PreconditionSide side) {
  return solve(a, precond, b, x0, settings, side == PreconditionSide::left ? Mode::left : Mode::right);
}

SolveResult fgmres(const LinearOperator& a, const LinearOperator& precond, const Vector& b,
                   const Vector& x0, const SolverSettings& settings) {
  return solve(a, precond, b, x0, settings, Mode::flexible);
}

}  // namespace hemo
