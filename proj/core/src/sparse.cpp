#include "hemo/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unsupported/Eigen/SparseExtra>

namespace hemo {

JacobiPreconditioner::JacobiPreconditioner(const SparseMatrix& a)
    : JacobiPreconditioner(Vector(a.diagonal())) {}

JacobiPreconditioner::JacobiPreconditioner(Vector diagonal) {
  for (Eigen::Index i = 0; i < diagonal.size(); ++i) {
    if (diagonal(i) == 0.0 || !std::isfinite(diagonal(i))) {
      throw SolverError("jacobi: zero or non-finite diagonal entry at row " + std::to_string(i));
    }
  }
  inv_diag_ = diagonal.cwiseInverse();
}

void JacobiPreconditioner::apply(const Vector& x, Vector& y) const {
  y = inv_diag_.cwiseProduct(x);
}

LinearOperator JacobiPreconditioner::as_operator() const {
  return [this](const Vector& x, Vector& y) { apply(x, y); };
}

Ilu0Preconditioner::Ilu0Preconditioner(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw SolverError("ilu0: matrix must be square");
  double scale = 0.0;
  for (int i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  if (scale == 0.0) scale = 1.0;
  double shift = 0.0;
  for (int attempt = 0; attempt < 30; ++attempt) {
    if (factor(a, shift)) {
      shift_ = shift;
      return;
    }
    shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
  }
  throw SolverError("ilu0: factorization failed even with a diagonal shift");
}

bool Ilu0Preconditioner::factor(const SparseMatrix& a, double shift) {
  const int n = static_cast<int>(a.rows());
  // explicit diagonal in every row, so a shift always has somewhere to go
  SparseMatrix id(n, n);
  id.setIdentity();
  lu_ = a + shift * id;
  lu_.makeCompressed();

  const int* outer = lu_.outerIndexPtr();
  const int* inner = lu_.innerIndexPtr();
  double* val = lu_.valuePtr();
  diag_pos_.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int p = outer[i]; p < outer[i + 1]; ++p) {
      if (inner[p] == i) diag_pos_[static_cast<std::size_t>(i)] = p;
    }
  }

  // IKJ variant restricted to the pattern
  std::vector<int> where(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int p = outer[i]; p < outer[i + 1]; ++p) where[static_cast<std::size_t>(inner[p])] = p;
    for (int p = outer[i]; p < outer[i + 1] && inner[p] < i; ++p) {
      const int k = inner[p];
      const double pivot = val[diag_pos_[static_cast<std::size_t>(k)]];
      val[p] /= pivot;
      const double lik = val[p];
      for (int q = diag_pos_[static_cast<std::size_t>(k)] + 1; q < outer[k + 1]; ++q) {
        const int w = where[static_cast<std::size_t>(inner[q])];
        if (w >= 0) val[w] -= lik * val[q];
      }
    }
    for (int p = outer[i]; p < outer[i + 1]; ++p) where[static_cast<std::size_t>(inner[p])] = -1;
    const double d = val[diag_pos_[static_cast<std::size_t>(i)]];
    if (!std::isfinite(d) || std::abs(d) < 1e-300) return false;
  }
  return true;
}

void Ilu0Preconditioner::apply(const Vector& x, Vector& y) const {
  const int n = static_cast<int>(lu_.rows());
  const int* outer = lu_.outerIndexPtr();
  const int* inner = lu_.innerIndexPtr();
  const double* val = lu_.valuePtr();
  y = x;
  for (int i = 0; i < n; ++i) {
    double s = y(i);
    for (int p = outer[i]; p < diag_pos_[static_cast<std::size_t>(i)]; ++p) s -= val[p] * y(inner[p]);
    y(i) = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    const int d = diag_pos_[static_cast<std::size_t>(i)];
    double s = y(i);
    for (int p = d + 1; p < outer[i + 1]; ++p) s -= val[p] * y(inner[p]);
    y(i) = s / val[d];
  }
}

LinearOperator Ilu0Preconditioner::as_operator() const {
  return [this](const Vector& x, Vector& y) { apply(x, y); };
}

void save_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  if (!Eigen::saveMarket(a, tmp.string())) throw Error("cannot write " + tmp.string());
  std::filesystem::rename(tmp, path);
}

SparseMatrix load_matrix_market(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("no such matrix file: " + path.string());
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> m;
  if (!Eigen::loadMarket(m, path.string())) throw Error("cannot parse matrix file " + path.string());
  return SparseMatrix(m);
}

}  // namespace hemo
