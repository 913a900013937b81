#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "spca/linalg.hpp"
#include "spca/rng.hpp"

namespace testing_util {

using spca::Matrix;
using spca::Vector;

inline Vector random_vector(spca::Stream& s, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = s.normal();
  return v;
}

inline Matrix random_matrix(spca::Stream& s, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = s.normal();
  }
  return m;
}

inline Matrix random_symmetric(spca::Stream& s, Eigen::Index n) {
  const Matrix a = random_matrix(s, n, n);
  return (a + a.transpose()) / 2.0;
}

/// Determinant by cofactor expansion along the first row.
inline double laplace_det(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    det += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * laplace_det(minor);
  }
  return det;
}

/// Roots of det(M - t I) located by a sign-change scan over the Gershgorin
/// interval and refined by bisection. Descending.
inline std::vector<double> charpoly_roots(const Matrix& m, int grid = 20000) {
  const Eigen::Index n = m.rows();
  double lo = 0, hi = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    lo = std::min(lo, m(i, i) - r);
    hi = std::max(hi, m(i, i) + r);
  }
  lo -= 1e-3;
  hi += 1e-3;
  auto f = [&](double t) { return laplace_det(m - t * Matrix::Identity(n, n)); };
  std::vector<double> roots;
  double prev_t = hi, prev_f = f(hi);
  for (int g = 1; g <= grid; ++g) {
    const double t = hi - (hi - lo) * g / grid;
    const double ft = f(t);
    if ((prev_f > 0) != (ft > 0)) {
      double a = t, b = prev_t, fa = ft;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm > 0) == (fa > 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_f = ft;
  }
  return roots;
}

/// Largest |eigenvalue| by power iteration on M^2, started from a fixed vector.
inline double power_iteration_norm(const Matrix& m, int iterations = 20000) {
  const Matrix m2 = m * m;
  Vector v = Vector::Ones(m.rows()) + Vector::LinSpaced(m.rows(), 0.0, 1.0);
  double est = 0;
  for (int i = 0; i < iterations; ++i) {
    Vector w = m2 * v;
    const double nw = w.norm();
    if (nw == 0) return 0.0;
    const double next = std::sqrt(v.dot(w) / v.squaredNorm());
    v = w / nw;
    if (i > 10 && std::abs(next - est) < 1e-15 * next) return next;
    est = next;
  }
  return est;
}

}  // namespace testing_util
