#pragma once

// Dense symmetric linear algebra: eigendecomposition, spectral norm,
// angles between lines, the rank-two eigenvalue formula and the
// first-order eigenvector perturbation bound.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spca/error.hpp"

namespace spca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric real matrix. Construction averages the input with its
/// transpose, so entries(i, j) == entries(j, i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Eigen::Ref<const Matrix>& m) {
    if (m.rows() != m.cols()) {
      throw InvalidInput("SymMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
    }
    if (!m.allFinite()) throw InvalidInput("SymMatrix: non-finite entries");
    data_ = 0.5 * (m + m.transpose());
  }

  static SymMatrix identity(Eigen::Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

  Eigen::Index dim() const noexcept { return data_.rows(); }
  const Matrix& matrix() const noexcept { return data_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

 private:
  Matrix data_;
};

/// Eigenpairs sorted by descending eigenvalue; eigenvectors are unit columns.
struct EigenResult {
  Vector values;
  Matrix vectors;

  Eigen::Index count() const noexcept { return values.size(); }
};

enum class EigenMethod {
  Auto,         // Jacobi up to jacobi_max_dim, tridiagonal QR above
  Jacobi,       // cyclic Jacobi rotations
  Tridiagonal,  // Householder tridiagonalisation + implicit QR (Eigen)
};

struct EigenOptions {
  EigenMethod method = EigenMethod::Auto;
  Eigen::Index jacobi_max_dim = 128;
  double tolerance = 1e-12;  // off-diagonal Frobenius mass relative to ||M||_F
  int max_sweeps = 100;
};

namespace detail {

struct FullEigen {
  Vector values;   // in solver output order
  Matrix vectors;  // columns paired with values
};

inline double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

/// Cyclic-by-row Jacobi. Rotation angles follow the symmetric Schur
/// decomposition of each 2x2 pivot block.
inline FullEigen jacobi_eigen(const Matrix& m, double tolerance, int max_sweeps, bool want_vectors) {
  const Eigen::Index n = m.rows();
  Matrix a = m;
  Matrix v = want_vectors ? Matrix::Identity(n, n) : Matrix();
  const double scale = m.norm();

  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > tolerance * scale) {
    if (sweep == max_sweeps) {
      throw NumericalFailure("Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) +
                                 " sweeps",
                             scale > 0 ? off / scale : off);
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        if (want_vectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    ++sweep;
    off = off_diagonal_norm(a);
  }
  return {a.diagonal(), std::move(v)};
}

inline FullEigen tridiagonal_eigen(const Matrix& m, bool want_vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, want_vectors ? Eigen::ComputeEigenvectors
                                                               : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("tridiagonal QR eigensolver did not converge",
                           std::numeric_limits<double>::quiet_NaN());
  }
  FullEigen out{solver.eigenvalues(), Matrix()};
  if (want_vectors) out.vectors = solver.eigenvectors();
  return out;
}

inline FullEigen full_eigen(const SymMatrix& m, const EigenOptions& opt, bool want_vectors) {
  const bool jacobi = opt.method == EigenMethod::Jacobi ||
                      (opt.method == EigenMethod::Auto && m.dim() <= opt.jacobi_max_dim);
  return jacobi ? jacobi_eigen(m.matrix(), opt.tolerance, opt.max_sweeps, want_vectors)
                : tridiagonal_eigen(m.matrix(), want_vectors);
}

/// Indices ordering `values` descending; ties keep solver order.
inline std::vector<Eigen::Index> descending_order(const Vector& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return idx;
}

}  // namespace detail

/// Flips v so that its largest-magnitude entry is positive (lowest index on ties).
inline void canonical_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Eigen::Index arg = 0;
  double best = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      arg = i;
    }
  }
  if (v(arg) < 0) v = -v;
}

/// Orients v against a reference direction; falls back to canonical_sign when
/// the projection is numerically zero.
inline void orient(Eigen::Ref<Vector> v, const Vector* reference) {
  if (reference != nullptr) {
    const double proj = reference->dot(v);
    if (std::abs(proj) > 1e-12) {
      if (proj < 0) v = -v;
      return;
    }
  }
  canonical_sign(v);
}

/// Top `count` eigenpairs of a symmetric matrix, descending.
inline EigenResult sym_eig(const SymMatrix& m, Eigen::Index count,
                           const std::optional<Vector>& sign_reference = std::nullopt,
                           const EigenOptions& options = {}) {
  if (count < 1 || count > m.dim()) {
    throw InvalidInput("sym_eig: count " + std::to_string(count) + " outside [1, " +
                       std::to_string(m.dim()) + "]");
  }
  if (sign_reference && sign_reference->size() != m.dim()) {
    throw InvalidInput("sym_eig: sign reference has wrong length");
  }
  const auto full = detail::full_eigen(m, options, true);
  const auto order = detail::descending_order(full.values);
  EigenResult out{Vector(count), Matrix(m.dim(), count)};
  const Vector* ref = sign_reference ? &*sign_reference : nullptr;
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    out.values(j) = full.values(src);
    out.vectors.col(j) = full.vectors.col(src).normalized();
    orient(out.vectors.col(j), ref);
  }
  return out;
}

/// All eigenvalues, descending.
inline Vector sym_eigenvalues(const SymMatrix& m, const EigenOptions& options = {}) {
  const auto full = detail::full_eigen(m, options, false);
  const auto order = detail::descending_order(full.values);
  Vector out(m.dim());
  for (Eigen::Index j = 0; j < m.dim(); ++j) out(j) = full.values(order[static_cast<std::size_t>(j)]);
  return out;
}

/// Operator 2-norm: largest eigenvalue magnitude.
inline double spectral_norm(const SymMatrix& m, const EigenOptions& options = {}) {
  if (m.dim() == 0) return 0.0;
  const Vector ev = sym_eigenvalues(m, options);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// sin and cos of the angle between the lines spanned by x and y.
struct LineAngle {
  double sine;
  double cosine;
};

inline LineAngle line_angle(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size()) throw InvalidInput("angle: vectors differ in length");
  const double nx = x.norm();
  const double ny = y.norm();
  if (!(nx > 0) || !(ny > 0)) throw InvalidInput("angle: zero vector");
  const Vector xu = x / nx;
  const Vector yu = y / ny;
  const double c = xu.dot(yu);
  // Orthogonal residual gives the sine without cancellation at small angles.
  const double s = (yu - c * xu).norm();
  return {std::min(s, 1.0), std::min(std::abs(c), 1.0)};
}

/// Angle in [0, pi/2] between the lines spanned by x and y.
inline double angle(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  const auto a = line_angle(x, y);
  return std::atan2(a.sine, a.cosine);
}

/// sin of angle(x, y); sign-invariant distance between directions.
inline double dist(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  return line_angle(x, y).sine;
}

/// Nonzero eigenvalues of rho u' + u rho', larger first.
inline std::pair<double, double> rank_two_eigs(const Eigen::Ref<const Vector>& rho,
                                               const Eigen::Ref<const Vector>& u) {
  if (rho.size() != u.size()) throw InvalidInput("rank_two_eigs: vectors differ in length");
  const double nr = rho.norm();
  const double nu = u.norm();
  if (!(nr > 0) || !(nu > 0)) throw InvalidInput("rank_two_eigs: zero vector");
  const double tau = std::clamp(rho.dot(u) / (nr * nu), -1.0, 1.0);
  return {(tau + 1.0) * nr * nu, (tau - 1.0) * nr * nu};
}

struct PerturbReport {
  double delta = 0.0;   // lambda_1(A) - lambda_2(A)
  double e_norm = 0.0;  // off-block column of Q'EQ
  double E_norm = 0.0;  // ||E||_2
  double bound = 0.0;   // 4 e_norm / delta
  bool applicable = false;  // E_norm <= delta / 5
};

/// Householder reflector H = I - 2ww'/w'w with w = q - e1, so H e1 = q.
inline Matrix householder_to_first_axis(const Eigen::Ref<const Vector>& q) {
  const Eigen::Index n = q.size();
  Vector w = q;
  w(0) -= 1.0;
  const double ww = w.squaredNorm();
  Matrix h = Matrix::Identity(n, n);
  if (ww > 0.0) h.noalias() -= (2.0 / ww) * w * w.transpose();
  return h;
}

/// Bound on the distance between the principal eigenvectors of A and A+E.
inline PerturbReport perturb_bound(const SymMatrix& a, const SymMatrix& e,
                                   const EigenOptions& options = {}) {
  if (a.dim() != e.dim()) throw InvalidInput("perturb_bound: dimension mismatch");
  if (a.dim() < 2) throw InvalidInput("perturb_bound: need dimension >= 2");
  const auto eig = sym_eig(a, 2, std::nullopt, options);
  PerturbReport r;
  r.delta = eig.values(0) - eig.values(1);
  if (r.delta <= 1e-12 * std::max(1.0, std::abs(eig.values(0)))) {
    throw DegenerateGap("perturb_bound: top eigenvalue of A is not simple");
  }
  const Matrix q = householder_to_first_axis(eig.vectors.col(0));
  const Matrix rotated = q.transpose() * e.matrix() * q;
  r.e_norm = rotated.col(0).tail(a.dim() - 1).norm();
  r.E_norm = spectral_norm(e, options);
  r.bound = 4.0 * r.e_norm / r.delta;
  r.applicable = r.E_norm <= r.delta / 5.0;
  return r;
}

}  // namespace spca
