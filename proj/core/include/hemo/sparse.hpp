#ifndef HEMO_SPARSE_HPP
#define HEMO_SPARSE_HPP

#include <filesystem>

#include "hemo/common.hpp"
#include "hemo/krylov.hpp"

namespace hemo {

/// y = diag(A)^-1 x.
class JacobiPreconditioner {
 public:
  JacobiPreconditioner() = default;
  explicit JacobiPreconditioner(const SparseMatrix& a);
  /// Build from an explicit diagonal. Throws SolverError on a zero entry.
  explicit JacobiPreconditioner(Vector diagonal);

  void apply(const Vector& x, Vector& y) const;
  const Vector& inverse_diagonal() const { return inv_diag_; }
  LinearOperator as_operator() const;

 private:
  Vector inv_diag_;
};

/// Zero-fill incomplete LU on the sparsity pattern of A (unit lower factor).
///
/// When a pivot vanishes the factorization is restarted on A + shift * I with
/// a growing shift; shift() reports the value used (0 when none was needed).
class Ilu0Preconditioner {
 public:
  Ilu0Preconditioner() = default;
  explicit Ilu0Preconditioner(const SparseMatrix& a);

  void apply(const Vector& x, Vector& y) const;
  double shift() const { return shift_; }
  LinearOperator as_operator() const;

 private:
  bool factor(const SparseMatrix& a, double shift);

  SparseMatrix lu_;
  std::vector<int> diag_pos_;
  double shift_ = 0.0;
};

/// Matrix Market coordinate exchange.
void save_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);
SparseMatrix load_matrix_market(const std::filesystem::path& path);

}  // namespace hemo

#endif  // HEMO_SPARSE_HPP
