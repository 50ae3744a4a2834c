#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numeric>

#include "fixtures.hpp"
#include "hemo/krylov.hpp"
#include "hemo/sparse.hpp"

using namespace hemo;
using namespace hemo::testing;

namespace {

SolverSettings settings(int restart, double rtol, int max_it) { return SolverSettings{restart, rtol, 1e-50, max_it}; }

DenseMatrix well_conditioned(int n, std::uint64_t seed) {
  DenseMatrix a(n, n);
  for (int j = 0; j < n; ++j) a.col(j) = random_vector(n, seed + static_cast<std::uint64_t>(j));
  return a + 2.0 * std::sqrt(double(n)) * DenseMatrix::Identity(n, n);
}

double true_relres(const SparseMatrix& a, const Vector& x, const Vector& b) { return (b - a * x).norm() / b.norm(); }

}  // namespace

TEST(Gmres, IdentityConvergesInOneStep) {
  SparseMatrix i(7, 7);
  i.setIdentity();
  const Vector b = random_vector(7, 1);
  const SolveResult r = gmres(as_operator(i), {}, b, Vector::Zero(7), settings(10, 1e-12, 10));
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 1);
  EXPECT_LT((r.x - b).norm(), 1e-14);
}

TEST(Gmres, DenseKrylovExactness) {
  const DenseMatrix a = well_conditioned(10, 100);
  const Vector b = random_vector(10, 2);
  const SolveResult r = gmres(as_operator(a), {}, b, Vector::Zero(10), settings(10, 1e-12, 10));
  EXPECT_TRUE(r.stats.converged);
  EXPECT_LE(r.stats.iterations, 10);
  EXPECT_LT((b - a * r.x).norm() / b.norm(), 1e-11);
}

TEST(Gmres, FiniteTermination) {
  for (int n : {5, 20, 50}) {
    const DenseMatrix a = well_conditioned(n, 300 + static_cast<std::uint64_t>(n));
    const Vector b = random_vector(n, 3);
    const SolveResult r = gmres(as_operator(a), {}, b, Vector::Zero(n), settings(n + 1, 1e-10, n + 1));
    EXPECT_TRUE(r.stats.converged) << n;
    EXPECT_LE(r.stats.iterations, n + 1);
  }
}

TEST(Gmres, HistoryMonotoneAcrossRestarts) {
  const SparseMatrix a = poisson_2d(16);
  const Vector b = random_vector(a.rows(), 4);
  for (auto side : {PreconditionSide::left, PreconditionSide::right}) {
    const SolveResult r =
        gmres(as_operator(a), JacobiPreconditioner(a).as_operator(), b, Vector::Zero(a.rows()), settings(10, 1e-10, 150), side);
    ASSERT_EQ(r.stats.history.front(), 1.0);
    for (std::size_t i = 1; i < r.stats.history.size(); ++i) {
      EXPECT_LE(r.stats.history[i], r.stats.history[i - 1] * (1.0 + 1e-12)) << i;
    }
  }
}

TEST(Gmres, JacobiNoWorseOnPoisson) {
  const SparseMatrix a = poisson_2d(32);
  const Vector b = Vector::Ones(a.rows());
  const auto s = settings(200, 1e-8, 400);
  const SolveResult plain = gmres(as_operator(a), {}, b, Vector::Zero(a.rows()), s);
  const SolveResult jac = gmres(as_operator(a), JacobiPreconditioner(a).as_operator(), b, Vector::Zero(a.rows()), s);
  ASSERT_TRUE(plain.stats.converged);
  ASSERT_TRUE(jac.stats.converged);
  EXPECT_LE(jac.stats.iterations, plain.stats.iterations);
}

TEST(Gmres, IluBeatsJacobiOnPoisson) {
  const SparseMatrix a = poisson_2d(16);
  const Vector b = Vector::Ones(a.rows());
  const auto s = settings(200, 1e-8, 400);
  const SolveResult jac = gmres(as_operator(a), JacobiPreconditioner(a).as_operator(), b, Vector::Zero(a.rows()), s);
  const SolveResult ilu = gmres(as_operator(a), Ilu0Preconditioner(a).as_operator(), b, Vector::Zero(a.rows()), s);
  ASSERT_TRUE(ilu.stats.converged);
  EXPECT_LT(ilu.stats.iterations, jac.stats.iterations);
  EXPECT_LT(true_relres(a, ilu.x, b), 1e-6);
}

TEST(Gmres, LeavesInitialGuessAloneOnFailure) {
  const SparseMatrix a = poisson_2d(12);
  const Vector b = random_vector(a.rows(), 5);
  const Vector x0 = random_vector(a.rows(), 6);
  const Vector keep = x0;
  for (int pass = 0; pass < 2; ++pass) {
    const SolveResult r = pass == 0 ? gmres(as_operator(a), {}, b, x0, settings(5, 1e-12, 3))
                                    : fgmres(as_operator(a), {}, b, x0, settings(5, 1e-12, 3));
    EXPECT_FALSE(r.stats.converged);
    EXPECT_EQ(r.stats.iterations, 3);
    EXPECT_EQ(x0, keep);
    EXPECT_LT(true_relres(a, r.x, b), true_relres(a, x0, b));
    EXPECT_NEAR(r.stats.relative_residual, r.stats.history.back(), 1e-15);
  }
}

TEST(Gmres, SettingsValidation) {
  EXPECT_THROW(SolverSettings({0, 1e-8, 1e-50, 10}).validate(), SolverError);
  EXPECT_THROW(SolverSettings({10, -1.0, 1e-50, 10}).validate(), SolverError);
  EXPECT_THROW(SolverSettings({10, 1e-8, 1e-50, 0}).validate(), SolverError);
  EXPECT_NO_THROW(SolverSettings{}.validate());
}

TEST(Fgmres, ExactPreconditionerOneStep) {
  const DenseMatrix a = well_conditioned(30, 7);
  const Eigen::PartialPivLU<DenseMatrix> lu(a);
  const LinearOperator p = [&lu](const Vector& x, Vector& y) { y = lu.solve(x); };
  const Vector b = random_vector(30, 8);
  const SolveResult r = fgmres(as_operator(a), p, b, Vector::Zero(30), settings(30, 1e-10, 30));
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 1);
}

TEST(Fgmres, IdentityMatchesGmres) {
  const SparseMatrix a = poisson_2d(10);
  const Vector b = random_vector(a.rows(), 9);
  const auto s = settings(30, 1e-9, 200);
  const SolveResult f = fgmres(as_operator(a), {}, b, Vector::Zero(a.rows()), s);
  const SolveResult g = gmres(as_operator(a), {}, b, Vector::Zero(a.rows()), s);
  ASSERT_EQ(f.stats.history.size(), g.stats.history.size());
  for (std::size_t i = 0; i < f.stats.history.size(); ++i) EXPECT_NEAR(f.stats.history[i], g.stats.history[i], 1e-12);
}

TEST(Fgmres, FixedPreconditionerMatchesRightGmres) {
  const SparseMatrix a = poisson_2d(12);
  const Vector b = random_vector(a.rows(), 10);
  const auto s = settings(20, 1e-10, 200);
  const Ilu0Preconditioner ilu(a);
  const SolveResult f = fgmres(as_operator(a), ilu.as_operator(), b, Vector::Zero(a.rows()), s);
  const SolveResult g = gmres(as_operator(a), ilu.as_operator(), b, Vector::Zero(a.rows()), s, PreconditionSide::right);
  ASSERT_EQ(f.stats.history.size(), g.stats.history.size());
  for (std::size_t i = 0; i < f.stats.history.size(); ++i) EXPECT_NEAR(f.stats.history[i], g.stats.history[i], 1e-10);
  EXPECT_LT(rel_diff(f.x, g.x), 1e-10);
}

TEST(Fgmres, InnerGmresPreconditioner) {
  const SparseMatrix a = poisson_2d(10);  // 100 x 100 SPD
  const Vector b = random_vector(a.rows(), 11);
  const auto s = settings(200, 1e-8, 200);
  const LinearOperator inner = [&a](const Vector& x, Vector& y) {
    y = gmres(as_operator(a), {}, x, Vector::Zero(x.size()), SolverSettings{50, 1e-2, 1e-50, 50}).x;
  };
  const SolveResult f = fgmres(as_operator(a), inner, b, Vector::Zero(a.rows()), s);
  const SolveResult g = gmres(as_operator(a), {}, b, Vector::Zero(a.rows()), s);
  EXPECT_TRUE(f.stats.converged);
  EXPECT_LE(f.stats.iterations, g.stats.iterations);
  EXPECT_LT(true_relres(a, f.x, b), 1e-8 * 1.0001);
}

TEST(Jacobi, DiagonalIsExact) {
  const Vector d = (Vector(4) << 2.0, -3.0, 0.5, 7.0).finished();
  SparseMatrix a(4, 4);
  for (int i = 0; i < 4; ++i) a.insert(i, i) = d(i);
  const Vector x = random_vector(4, 12);
  Vector y;
  JacobiPreconditioner(a).apply(a * x, y);
  EXPECT_LT((y - x).norm(), 1e-15);
}

TEST(Jacobi, RankOneDiagonal) {
  BlockTangent t;
  t.f = SparseMatrix(5, 5);
  t.f.setIdentity();
  t.b = SparseMatrix(5, 1);
  t.c = SparseMatrix(1, 5);
  t.d = SparseMatrix(1, 1);
  t.rank_ones.push_back({2.0, Vector::Unit(5, 0)});
  const Vector diag = t.diagonal_a();
  EXPECT_EQ(diag, (Vector(5) << 3, 1, 1, 1, 1).finished());
  const JacobiPreconditioner p(diag);
  EXPECT_DOUBLE_EQ(p.inverse_diagonal()(0), 1.0 / 3.0);
}

TEST(Jacobi, PermutationEquivariant) {
  const SparseMatrix a = poisson_2d(5) + SparseMatrix(DenseMatrix(random_vector(25, 13).asDiagonal()).sparseView());
  Eigen::VectorXi idx(25);
  std::iota(idx.data(), idx.data() + 25, 0);
  std::reverse(idx.data() + 3, idx.data() + 20);
  const Eigen::PermutationMatrix<Eigen::Dynamic> perm(idx);
  const SparseMatrix pa = (perm * a * perm.transpose()).eval();
  const Vector x = random_vector(25, 14);
  Vector y1, y2;
  JacobiPreconditioner(a).apply(x, y1);
  JacobiPreconditioner(pa).apply(perm * x, y2);
  EXPECT_LT((perm * y1 - y2).norm(), 1e-14 * y1.norm());
}

TEST(Jacobi, ZeroDiagonalThrows) {
  SparseMatrix a(2, 2);
  a.insert(0, 1) = 1.0;
  a.insert(1, 1) = 1.0;
  EXPECT_THROW(JacobiPreconditioner{a}, SolverError);
}

TEST(Ilu0, ExactForTriangularAndTridiagonal) {
  SparseMatrix lower(6, 6);
  SparseMatrix tri(6, 6);
  for (int i = 0; i < 6; ++i) {
    lower.insert(i, i) = 2.0 + i;
    tri.insert(i, i) = 4.0;
    if (i > 0) {
      lower.insert(i, i - 1) = -1.0 + 0.1 * i;
      if (i > 1) lower.insert(i, 0) = 0.3;
      tri.insert(i, i - 1) = -1.0;
      tri.insert(i - 1, i) = -1.0;
    }
  }
  lower.makeCompressed();
  tri.makeCompressed();
  const Vector b = random_vector(6, 15);
  for (const SparseMatrix* a : {&lower, &tri}) {
    Vector y;
    const Ilu0Preconditioner ilu(*a);
    ilu.apply(b, y);
    EXPECT_LT((*a * y - b).norm(), 1e-12 * b.norm());
    EXPECT_EQ(ilu.shift(), 0.0);
  }
}

TEST(MatrixMarket, RoundTrip) {
  const SparseMatrix a = poisson_2d(4);
  const auto dir = scratch_dir("mm");
  save_matrix_market(a, dir / "a.mtx");
  const SparseMatrix r = load_matrix_market(dir / "a.mtx");
  EXPECT_EQ(DenseMatrix(r), DenseMatrix(a));
}
