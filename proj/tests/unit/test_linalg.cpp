#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "spca/linalg.hpp"

using namespace spca;
using namespace testing_util;

namespace {

void expect_eigen_invariants(const Matrix& m, const EigenResult& r, double tol) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < r.count(); ++j) {
    const Vector v = r.vectors.col(j);
    EXPECT_LE((m * v - r.values(j) * v).norm(), tol * scale * m.rows());
    if (j > 0) EXPECT_GE(r.values(j - 1), r.values(j));
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(v(arg), 0.0);
  }
  const Matrix gram = r.vectors.transpose() * r.vectors;
  EXPECT_LE((gram - Matrix::Identity(r.count(), r.count())).cwiseAbs().maxCoeff(), tol * m.rows());
}

}  // namespace

TEST(SymEig, IdentityHasUnitEigenvalues) {
  const auto r = sym_eig(SymMatrix::identity(3), 3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.values(j), 1.0, 1e-14);
}

TEST(SymEig, TwoByTwoByHand) {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const auto r = sym_eig(SymMatrix(m), 2);
  EXPECT_NEAR(r.values(0), 3.0, 1e-13);
  EXPECT_NEAR(r.values(1), 1.0, 1e-13);
  const double h = std::numbers::sqrt2 / 2;
  EXPECT_NEAR(r.vectors(0, 0), h, 1e-13);
  EXPECT_NEAR(r.vectors(1, 0), h, 1e-13);
  EXPECT_NEAR(std::abs(r.vectors(0, 1)), h, 1e-13);
  EXPECT_NEAR(r.vectors(0, 1), -r.vectors(1, 1), 1e-13);
}

TEST(SymEig, MatchesCharacteristicPolynomialRoots) {
  Stream s(11, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = random_symmetric(s, 6);
    const auto roots = charpoly_roots(m);
    ASSERT_EQ(roots.size(), 6u);
    const auto r = sym_eig(SymMatrix(m), 6);
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(r.values(j), roots[static_cast<std::size_t>(j)], 1e-8);
  }
}

TEST(SymEig, InvariantsOverRandomMatrices) {
  Stream s(12, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(s.uniform() * 64);
    const Matrix m = random_symmetric(s, dim);
    const Eigen::Index count = 1 + static_cast<Eigen::Index>(s.uniform() * static_cast<double>(dim));
    expect_eigen_invariants(m, sym_eig(SymMatrix(m), count), 1e-10);
  }
}

TEST(SymEig, JacobiAndTridiagonalAgree) {
  Stream s(13, 0);
  const Matrix m = random_symmetric(s, 40);
  const auto a = sym_eig(SymMatrix(m), 40, std::nullopt, {EigenMethod::Jacobi});
  const auto b = sym_eig(SymMatrix(m), 40, std::nullopt, {EigenMethod::Tridiagonal});
  EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((a.vectors - b.vectors).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SymEig, LargeDimensionUsesFastPath) {
  Stream s(14, 0);
  const Matrix m = random_symmetric(s, 200);
  expect_eigen_invariants(m, sym_eig(SymMatrix(m), 10), 1e-10);
}

TEST(SymEig, SignReferenceOrientsVectors) {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const Vector ref = Vector::Constant(2, -1.0);
  const auto r = sym_eig(SymMatrix(m), 1, ref);
  EXPECT_LT(r.vectors(0, 0), 0.0);
}

TEST(SymEig, RejectsBadCount) {
  EXPECT_THROW(sym_eig(SymMatrix::identity(3), 0), InvalidInput);
  EXPECT_THROW(sym_eig(SymMatrix::identity(3), 4), InvalidInput);
}

TEST(SymEig, SweepCapRaisesNumericalFailure) {
  Stream s(15, 0);
  const Matrix m = random_symmetric(s, 30);
  EigenOptions opt{EigenMethod::Jacobi};
  opt.max_sweeps = 1;
  try {
    sym_eig(SymMatrix(m), 1, std::nullopt, opt);
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(SymMatrix, SymmetrizesAndRejectsNonSquare) {
  Matrix m(2, 2);
  m << 1, 2, 4, 4;
  EXPECT_EQ(SymMatrix(m)(0, 1), 3.0);
  EXPECT_EQ(SymMatrix(m)(1, 0), 3.0);
  EXPECT_THROW(SymMatrix{Matrix(2, 3)}, InvalidInput);
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(SymMatrix::identity(5)), 1.0, 1e-14);
  Vector rho(3);
  rho << 1, 2, 2;
  EXPECT_NEAR(spectral_norm(SymMatrix(rho * rho.transpose())), 9.0, 1e-12);
}

TEST(SpectralNorm, MatchesPowerIteration) {
  Stream s(16, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = random_symmetric(s, 8);
    EXPECT_NEAR(spectral_norm(SymMatrix(m)), power_iteration_norm(m), 1e-8);
  }
}

TEST(SpectralNorm, OffBlockBound) {
  Stream s(17, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(s.uniform() * 20);
    const Matrix a = random_symmetric(s, dim);
    EXPECT_LE(a.col(0).tail(dim - 1).norm(), spectral_norm(SymMatrix(a)) + 1e-12);
  }
}

TEST(Angle, Examples) {
  Vector rho(3);
  rho << 1, -2, 0.5;
  EXPECT_NEAR(angle(rho, rho), 0.0, 1e-15);
  EXPECT_NEAR(dist(rho, rho), 0.0, 1e-15);
  const Vector e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
  EXPECT_NEAR(angle(e1, e2), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(dist(e1, e2), 1.0, 1e-15);
  Vector x(2), y(2);
  x << 1, 0;
  y << 1, 1;
  EXPECT_NEAR(angle(x, y), std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(dist(x, y), 0.70711, 1e-5);
  EXPECT_NEAR(angle(x, -y), std::numbers::pi / 4, 1e-15);
}

TEST(Angle, ScaleInvariant) {
  Stream s(18, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = random_vector(s, 7), y = random_vector(s, 7);
    const double a = (s.uniform() - 0.5) * 200, b = (s.uniform() - 0.5) * 0.02;
    EXPECT_NEAR(angle(a * x, b * y), angle(x, y), 1e-12);
  }
}

TEST(Angle, RejectsZeroAndMismatch) {
  EXPECT_THROW(angle(Vector::Zero(3), Vector::Ones(3)), InvalidInput);
  EXPECT_THROW(angle(Vector::Ones(2), Vector::Ones(3)), InvalidInput);
}

TEST(AngleInequality, ImageAngleAtMostThreeTimesEigenvectorAngle) {
  Stream s(19, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(s.uniform() * 10);
    const Matrix m = random_symmetric(s, dim);
    const auto full = sym_eig(SymMatrix(m), dim);
    // principal eigenvector: largest |eigenvalue|
    const Eigen::Index top = std::abs(full.values(0)) >= std::abs(full.values(dim - 1)) ? 0 : dim - 1;
    const Vector xi = full.vectors.col(top);
    const Vector eta = (s.uniform() < 0.5) ? Vector(xi + 0.3 * random_vector(s, dim)) : random_vector(s, dim);
    const Vector image = m * eta;
    if (image.norm() == 0) continue;
    EXPECT_LE(angle(eta, image), 3 * angle(eta, xi) + 1e-9);
  }
}

TEST(RankTwo, Examples) {
  Vector rho = Vector::Zero(3), u = Vector::Zero(3);
  rho(0) = 2;
  u(1) = 3;
  auto [a, b] = rank_two_eigs(rho, u);
  EXPECT_NEAR(a, 6.0, 1e-14);
  EXPECT_NEAR(b, -6.0, 1e-14);
  const Vector unit = Vector::Unit(4, 2);
  std::tie(a, b) = rank_two_eigs(unit, unit);
  EXPECT_NEAR(a, 2.0, 1e-14);
  EXPECT_NEAR(b, 0.0, 1e-14);
}

TEST(RankTwo, MatchesExplicitMatrix) {
  Stream s(20, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector rho = random_vector(s, 5), u = random_vector(s, 5);
    const Matrix m = rho * u.transpose() + u * rho.transpose();
    const Vector ev = sym_eigenvalues(SymMatrix(m));
    const auto [a, b] = rank_two_eigs(rho, u);
    EXPECT_NEAR(a, ev(0), 1e-10);
    EXPECT_NEAR(b, ev(4), 1e-10);
  }
}

TEST(Perturb, ZeroPerturbation) {
  Vector d(3);
  d << 10, 1, 1;
  const Matrix a = d.asDiagonal();
  const auto r = perturb_bound(SymMatrix(a), SymMatrix(Matrix::Zero(3, 3)));
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_TRUE(r.applicable);
}

TEST(Perturb, BoundDominatesMeasuredDistance) {
  Stream s(21, 0);
  Vector d(3);
  d << 10, 1, 1;
  const Matrix a = d.asDiagonal();
  for (int trial = 0; trial < 50; ++trial) {
    Matrix e = random_symmetric(s, 3);
    e *= 1.8 * s.uniform() / spectral_norm(SymMatrix(e));
    const auto r = perturb_bound(SymMatrix(a), SymMatrix(e));
    EXPECT_TRUE(r.applicable);
    const Vector v0 = sym_eig(SymMatrix(a), 1).vectors.col(0);
    const Vector v1 = sym_eig(SymMatrix(Matrix(a + e)), 1).vectors.col(0);
    EXPECT_LE(dist(v0, v1), r.bound + 1e-12);
  }
}

TEST(Perturb, DegenerateGap) {
  Vector d(3);
  d << 5, 5, 1;
  const Matrix a = d.asDiagonal();
  EXPECT_THROW(perturb_bound(SymMatrix(a), SymMatrix(Matrix::Zero(3, 3))), DegenerateGap);
}

TEST(Householder, MapsFirstAxisToVector) {
  Stream s(22, 0);
  const Vector q = random_vector(s, 6).normalized();
  const Matrix h = householder_to_first_axis(q);
  EXPECT_LE((h * Vector::Unit(6, 0) - q).norm(), 1e-14);
  EXPECT_LE((h.transpose() * h - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-14);
}
