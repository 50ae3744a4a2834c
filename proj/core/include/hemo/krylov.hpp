#ifndef HEMO_KRYLOV_HPP
#define HEMO_KRYLOV_HPP

#include <functional>
#include <vector>

#include "hemo/common.hpp"

namespace hemo {

/// y <- Op(x). An empty LinearOperator stands for the identity.
using LinearOperator = std::function<void(const Vector& x, Vector& y)>;

LinearOperator as_operator(const SparseMatrix& a);
LinearOperator as_operator(const DenseMatrix& a);

struct SolverSettings {
  int restart = 200;
  double rtol = 1e-8;
  double atol = 1e-50;
  int max_iterations = 200;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 1.0;
  bool converged = false;
  /// FGMRES only: a full restart cycle ended without reducing the residual.
  bool stagnated = false;
  /// Relative residual after each Krylov step; entry 0 is the initial one.
  std::vector<double> history;
};

struct SolveResult {
  Vector x;
  SolveStats stats;
};

enum class PreconditionSide { left, right };

/// Restarted GMRES(m). With left preconditioning the stopping test uses the
/// preconditioned residual relative to ||P^-1 b||; with right preconditioning
/// the true residual relative to ||b||. x0 is never modified; on failure the
/// best iterate is returned with converged = false.
SolveResult gmres(const LinearOperator& a, const LinearOperator& precond, const Vector& b,
                  const Vector& x0, const SolverSettings& settings,
                  PreconditionSide side = PreconditionSide::left);

/// Flexible GMRES(m) with a right preconditioner that may change between
/// iterations. Stores both the Krylov basis and the preconditioned vectors.
SolveResult fgmres(const LinearOperator& a, const LinearOperator& precond, const Vector& b,
                   const Vector& x0, const SolverSettings& settings);

}  // namespace hemo

#endif  // HEMO_KRYLOV_HPP
