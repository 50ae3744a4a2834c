#ifndef HEMO_PRECOND_HPP
#define HEMO_PRECOND_HPP

#include <Eigen/LU>
#include <memory>
#include <string_view>
#include <vector>

#include "hemo/assembly.hpp"
#include "hemo/krylov.hpp"
#include "hemo/sparse.hpp"

namespace hemo {

enum class APrecond { jacobi, ilu0, none };
/// Preconditioner for the Schur-complement solve, built from a sparse
/// approximation: ILU(0) or Jacobi of S_hat, or the rank-one corrected S_tilde.
enum class SPrecond { ilu0, jacobi, bipn, none };
enum class BlockPrecond { scr, simple, block_diag, none };

APrecond parse_a_precond(std::string_view text);
SPrecond parse_s_precond(std::string_view text);
BlockPrecond parse_block_precond(std::string_view text);
std::string_view to_string(BlockPrecond p);

/// Tolerances and caps of the three nested levels below the outer solver.
struct NestedSettings {
  SolverSettings a{200, 1e-4, 1e-50, 200};      ///< intermediate A solves
  SolverSettings s{200, 1e-4, 1e-50, 200};      ///< Schur solve
  SolverSettings inner{200, 1e-2, 1e-50, 200};  ///< A solves inside the Schur action
  APrecond pa = APrecond::jacobi;
  SPrecond ps = SPrecond::ilu0;

  void validate() const;
};

/// Counters aggregated over every sub-solve of one preconditioned solve.
struct SubSolveStats {
  long a_solves = 0;
  long a_iterations = 0;
  long s_solves = 0;
  long s_iterations = 0;
  long inner_solves = 0;
  long inner_iterations = 0;
  long unconverged = 0;

  void record_a(const SolveStats& s);
  void record_s(const SolveStats& s);
  void record_inner(const SolveStats& s);
};

/// D - C diag(A)^-1 B, with diag(A) including the rank-one terms.
SparseMatrix schur_sparse_approx(const BlockTangent& t);

/// S_tilde = S_F + sum_k c_k (C b_k)(B^T b_k)^T with S_F = D - C diag(F)^-1 B,
/// b_k = diag(F)^-1 a_k and c_k = w_k / (1 + w_k a_k.b_k). Exact whenever
/// F is diagonal.
struct BipnSchur {
  SparseMatrix base;
  std::vector<double> coef;
  std::vector<Vector> left;   ///< C b_k
  std::vector<Vector> right;  ///< B^T b_k

  void apply(const Vector& x, Vector& y) const;
  DenseMatrix to_dense() const;
};

BipnSchur bipn_schur(const BlockTangent& t);

/// Shared state of one block preconditioner: the tangent, P_A built once,
/// S_hat and P_S. Sub-solve counters are accumulated in stats().
class SchurContext {
 public:
  SchurContext(const BlockTangent& t, NestedSettings settings);
  SchurContext(const SchurContext&) = delete;
  SchurContext& operator=(const SchurContext&) = delete;

  const BlockTangent& tangent() const { return *t_; }
  const NestedSettings& settings() const { return settings_; }
  const SparseMatrix& s_hat() const { return s_hat_; }
  const Vector& a_diagonal() const { return diag_a_; }

  /// GMRES + P_A on A x = b from a zero initial guess.
  SolveResult solve_a(const Vector& b, const SolverSettings& settings) const;
  /// GMRES + P_S on the matrix-free S with a zero initial guess.
  SolveResult solve_s(const Vector& b) const;
  /// GMRES + P_S on S_hat (no inner solver).
  SolveResult solve_s_hat(const Vector& b) const;

  /// y = D x - C A^-1 (B x), the inner A solve at the inner tolerance.
  void schur_apply(const Vector& x, Vector& y) const;
  /// Whether the last schur_apply's inner solve converged.
  bool last_inner_converged() const { return last_inner_converged_; }

  const LinearOperator& pa() const { return pa_op_; }
  const LinearOperator& ps() const { return ps_op_; }

  SubSolveStats& stats() const { return stats_; }

 private:
  const BlockTangent* t_;
  NestedSettings settings_;
  Vector diag_a_;
  SparseMatrix s_hat_;
  std::unique_ptr<JacobiPreconditioner> pa_jacobi_;
  std::unique_ptr<Ilu0Preconditioner> pa_ilu_;
  std::unique_ptr<JacobiPreconditioner> ps_jacobi_;
  std::unique_ptr<Ilu0Preconditioner> ps_ilu_;
  // Woodbury pieces for the S_tilde preconditioner
  std::unique_ptr<Ilu0Preconditioner> bipn_ilu_;
  DenseMatrix bipn_z_;          // ILU^-1 applied to the left vectors
  DenseMatrix bipn_w_;          // right vectors
  Eigen::PartialPivLU<DenseMatrix> bipn_cap_;
  LinearOperator a_op_;
  LinearOperator pa_op_;
  LinearOperator ps_op_;
  mutable SubSolveStats stats_;
  mutable bool last_inner_converged_ = true;
};

/// Stand-alone Schur action (convenience wrapper over SchurContext).
Vector schur_apply(const SchurContext& ctx, const Vector& x);

/// Stacked vectors are [velocity; pressure].
Vector scr_apply(const SchurContext& ctx, const Vector& s);
Vector simple_apply(const SchurContext& ctx, const Vector& s);
Vector block_diag_apply(const SchurContext& ctx, const Vector& s);

/// Operator applying the selected block preconditioner through ctx.
LinearOperator block_preconditioner(const SchurContext& ctx, BlockPrecond kind);

/// Dense P_SIMPLE = [A, A diag(A)^-1 B; C, D], for checking simple_apply.
DenseMatrix simple_dense(const BlockTangent& t);

struct LinearSolverConfig {
  SolverSettings outer{200, 1e-8, 1e-50, 200};
  BlockPrecond precond = BlockPrecond::scr;
  NestedSettings nested;
  /// Sparse LU on the assembled block system instead of a Krylov solve.
  bool direct = false;
};

struct LinearSolveReport {
  Vector x;
  SolveStats outer;
  SubSolveStats sub;
};

/// Solves [A B; C D] x = rhs by FGMRES with the configured preconditioner
/// (zero initial guess), or directly.
LinearSolveReport solve_block_system(const BlockTangent& t, const Vector& rhs,
                                     const LinearSolverConfig& config);

}  // namespace hemo

#endif  // HEMO_PRECOND_HPP
