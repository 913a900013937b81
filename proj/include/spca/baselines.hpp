#pragma once

// Standard PCA and roughness-penalised (smoothed) PCA.

#include <Eigen/Dense>

#include <cmath>
#include <utility>

#include "spca/error.hpp"
#include "spca/linalg.hpp"
#include "spca/synth.hpp"

namespace spca {

enum class PcaRoute {
  Auto,    // Gram matrix when p > n
  Direct,  // p x p covariance
  Gram,    // n x n Gram matrix, eigenvectors lifted through X^T
};

/// Top eigenpairs of S = X^T X / n (column means removed first when `center`).
inline EigenResult standard_pca(const Eigen::Ref<const Matrix>& x, Eigen::Index n_components, bool center = false,
                                PcaRoute route = PcaRoute::Auto, const EigenOptions& options = {}) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n < 1 || p < 1) throw InvalidInput("standard_pca: empty data");
  if (n_components < 1 || n_components > std::min(n, p)) {
    throw InvalidInput("standard_pca: n_components must lie in [1, min(n, p)]");
  }
  Matrix xc;
  if (center) xc = x.rowwise() - x.colwise().mean();
  const Eigen::Ref<const Matrix> data = center ? Eigen::Ref<const Matrix>(xc) : x;
  const double inv_n = 1.0 / static_cast<double>(n);

  const bool gram = route == PcaRoute::Gram || (route == PcaRoute::Auto && p > n);
  if (!gram) {
    Matrix s = Matrix::Zero(p, p);
    s.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(), inv_n);
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    return sym_eig(SymMatrix(s), n_components, std::nullopt, options);
  }

  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(data, inv_n);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  const EigenResult small = sym_eig(SymMatrix(g), n_components, std::nullopt, options);
  EigenResult out{small.values, Matrix(p, n_components)};
  for (Eigen::Index j = 0; j < n_components; ++j) {
    Vector lifted = data.transpose() * small.vectors.col(j);
    const double len = lifted.norm();
    if (!(len > 0)) throw NumericalFailure("standard_pca: Gram eigenvector lies in the null space of X^T", len);
    lifted /= len;
    canonical_sign(lifted);
    out.vectors.col(j) = lifted;
  }
  return out;
}

inline EigenResult standard_pca(const SignalMatrix& x, Eigen::Index n_components, bool center = false,
                                PcaRoute route = PcaRoute::Auto) {
  return standard_pca(x.data, n_components, center && !x.centered, route);
}

/// (p-2) x p second-difference operator, rows (1, -2, 1).
inline Matrix second_diff_matrix(Eigen::Index p) {
  if (p < 3) throw InvalidInput("second_diff_matrix: p must be at least 3");
  Matrix d = Matrix::Zero(p - 2, p);
  for (Eigen::Index i = 0; i < p - 2; ++i) {
    d(i, i) = 1.0;
    d(i, i + 1) = -2.0;
    d(i, i + 2) = 1.0;
  }
  return d;
}

/// D2^T D2 assembled directly (pentadiagonal).
inline Matrix second_diff_gram(Eigen::Index p) {
  if (p < 3) throw InvalidInput("second_diff_matrix: p must be at least 3");
  Matrix g = Matrix::Zero(p, p);
  constexpr double row[3] = {1.0, -2.0, 1.0};
  for (Eigen::Index i = 0; i < p - 2; ++i) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) g(i + a, i + b) += row[a] * row[b];
    }
  }
  return g;
}

struct SmoothedSpec {
  double lambda = 0.0;
  // Penalise second differences on the unit grid t = l/p, i.e. scale D2^T D2 by p^4.
  bool grid_scaled = true;
};

/// Precomputed M^(-1/2) for M = I + lambda' D2^T D2.
class SmoothingOperator {
 public:
  SmoothingOperator(Eigen::Index p, const SmoothedSpec& spec) : p_(p), spec_(spec) {
    if (!(spec.lambda >= 0) || !std::isfinite(spec.lambda)) {
      throw InvalidInput("smoothed_pca: lambda must be finite and >= 0");
    }
    if (spec.lambda == 0.0) return;
    const double pd = static_cast<double>(p);
    const double scale = spec.grid_scaled ? spec.lambda * pd * pd * pd * pd : spec.lambda;
    Matrix m = Matrix::Identity(p, p) + scale * second_diff_gram(p);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw NumericalFailure("smoothed_pca: eigensolver failed on M", 0.0);
    inv_sqrt_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                es.eigenvectors().transpose();
  }

  Eigen::Index dim() const noexcept { return p_; }
  bool identity() const noexcept { return spec_.lambda == 0.0; }
  const SmoothedSpec& spec() const noexcept { return spec_; }

  /// M^(-1/2), or an empty matrix when lambda = 0.
  const Matrix& inv_sqrt() const noexcept { return inv_sqrt_; }

  /// Smoothed principal components of x (cases in rows).
  EigenResult apply(const Eigen::Ref<const Matrix>& x, Eigen::Index n_components, bool center = false) const {
    if (x.cols() != p_) throw InvalidInput("smoothed_pca: data width does not match operator");
    if (identity()) return standard_pca(x, n_components, center);
    Matrix y = x * inv_sqrt_;
    EigenResult r = standard_pca(y, n_components, center);
    for (Eigen::Index j = 0; j < r.count(); ++j) {
      Vector xi = inv_sqrt_ * r.vectors.col(j);
      xi.normalize();
      canonical_sign(xi);
      r.vectors.col(j) = xi;
    }
    return r;
  }

 private:
  Eigen::Index p_;
  SmoothedSpec spec_;
  Matrix inv_sqrt_;
};

/// Maximises Var(xi^T x) / (|xi|^2 + lambda |D2 xi|^2); returned values are the
/// eigenvalues of M^(-1/2) S M^(-1/2).
inline EigenResult smoothed_pca(const Eigen::Ref<const Matrix>& x, const SmoothedSpec& spec,
                                Eigen::Index n_components, bool center = false) {
  return SmoothingOperator(x.cols(), spec).apply(x, n_components, center);
}

inline EigenResult smoothed_pca(const SignalMatrix& x, const SmoothedSpec& spec, Eigen::Index n_components,
                                bool center = false) {
  return smoothed_pca(x.data, spec, n_components, center && !x.centered);
}

/// Roughness |D2 xi| / |xi| of a vector.
inline double roughness(const Eigen::Ref<const Vector>& xi) {
  const Eigen::Index p = xi.size();
  if (p < 3) throw InvalidInput("roughness: vector too short");
  const Vector d = xi.head(p - 2) - 2.0 * xi.segment(1, p - 2) + xi.tail(p - 2);
  return d.norm() / xi.norm();
}

}  // namespace spca
