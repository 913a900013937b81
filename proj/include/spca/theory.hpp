#pragma once

// Closed-form bounds for principal-component estimation and coordinate
// selection, and an empirical decomposition of the sample covariance.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "spca/error.hpp"
#include "spca/linalg.hpp"
#include "spca/synth.hpp"

namespace spca {

/// Bound value clipped to [0, 1] with a flag recording whether it says anything.
struct BoundReport {
  double raw = 0.0;
  double value = 0.0;
  bool informative = true;
};

inline BoundReport clip_probability(double raw) { return {raw, std::min(raw, 1.0), raw <= 1.0}; }

/// Asymptotic bound on dist(rho_hat, rho) for standard PCA in the single-component model.
inline double zeta_bound(double tau, double c) {
  if (!(tau > 0)) throw InvalidInput("zeta_bound: tau must be positive");
  if (!(c >= 0)) throw InvalidInput("zeta_bound: c must be nonnegative");
  const double rc = std::sqrt(c);
  return (4.0 * rc / tau) * (1.0 + (2.0 + rc) / tau);
}

struct BoundParams {
  double c = 0.0;
  double sigma = 1.0;
  std::vector<double> rho_norms;  // varrho_1 > varrho_2 >= ...
};

/// Multi-component analogue of zeta_bound.
inline double omega_bound(const BoundParams& bp) {
  if (bp.rho_norms.empty()) throw InvalidInput("omega_bound: no component norms");
  if (!(bp.c >= 0) || !(bp.sigma >= 0)) throw InvalidInput("omega_bound: c and sigma must be nonnegative");
  for (double r : bp.rho_norms) {
    if (!(r >= 0)) throw InvalidInput("omega_bound: component norms must be nonnegative");
  }
  const double r1 = bp.rho_norms[0];
  const double r2 = bp.rho_norms.size() > 1 ? bp.rho_norms[1] : 0.0;
  if (!(r1 > r2)) throw InvalidInput("omega_bound: first component norm must strictly exceed the second");
  double plus = 0.0;
  for (double r : bp.rho_norms) plus += r;
  const double rc = std::sqrt(bp.c);
  return 4.0 * bp.sigma * rc * (plus + (2.0 + rc) * bp.sigma) / (r1 * r1 - r2 * r2);
}

/// Omega is applicable only up to 4/5.
inline BoundReport assess_omega(const BoundParams& bp) {
  const double raw = omega_bound(bp);
  return {raw, std::min(raw, 1.0), raw <= 0.8};
}

inline BoundReport assess_zeta(double tau, double c) { return clip_probability(zeta_bound(tau, c)); }

/// P{chi^2_n <= n(1 - eps)} <= exp(-n eps^2 / 4), 0 <= eps < 1.
inline double chi2_tail_lower(double n, double eps) {
  if (!(n > 0)) throw DomainError("chi2_tail_lower: n must be positive");
  if (!(eps >= 0 && eps < 1)) throw DomainError("chi2_tail_lower: eps outside [0, 1)");
  return std::exp(-n * eps * eps / 4.0);
}

/// P{chi^2_n >= n(1 + eps)} <= exp(-3 n eps^2 / 16), 0 <= eps < 1/2.
inline double chi2_tail_upper(double n, double eps) {
  if (!(n > 0)) throw DomainError("chi2_tail_upper: n must be positive");
  if (!(eps >= 0 && eps < 0.5)) throw DomainError("chi2_tail_upper: eps outside [0, 1/2)");
  return std::exp(-3.0 * n * eps * eps / 16.0);
}

/// P{chi^2_n >= n + t sqrt(2n)} <= exp(-t^2/2) / t, n >= 16, 0 <= t <= n^(1/6); clipped at 1.
inline double chi2_tail_sharp(double n, double t) {
  if (!(n >= 16)) throw DomainError("chi2_tail_sharp: n must be at least 16");
  if (!(t >= 0 && t <= std::pow(n, 1.0 / 6.0))) throw DomainError("chi2_tail_sharp: t outside [0, n^(1/6)]");
  if (t == 0) return 1.0;
  return std::min(1.0, std::exp(-0.5 * t * t) / t);
}

/// Large-deviation rate n^(-3b/2) for the mean of n products of independent normals,
/// P{mean > sqrt(b log n / n)}, up to a constant factor.
inline double prod_tail(double n, double b) {
  if (!(n > 1)) throw DomainError("prod_tail: n must exceed 1");
  if (!(b >= 0)) throw DomainError("prod_tail: b must be nonnegative");
  return std::pow(n, -1.5 * b);
}

struct SelectionBoundParams {
  double p = 1, n = 2, k = 1;
  double gamma = 1.0;

  double alpha_n() const { return gamma * std::sqrt(std::log(n) / n); }
  double b_gamma() const {
    const double s3 = std::sqrt(3.0);
    const double r = gamma * s3 / (4.0 + 2.0 * s3);
    return r * r;
  }

  /// gamma giving a prescribed alpha_n.
  static double gamma_for_alpha(double alpha, double n) { return alpha / std::sqrt(std::log(n) / n); }
};

/// Probability bound for a false exclusion or inclusion when picking the top k of p variances.
inline double fe_fi_bound(const SelectionBoundParams& sp) {
  if (!(sp.n >= 2)) throw InvalidInput("fe_fi_bound: n must be at least 2");
  if (!(sp.p >= 1) || !(sp.k >= 1) || sp.k > sp.p) throw InvalidInput("fe_fi_bound: need 1 <= k <= p");
  if (!(sp.gamma > 0)) throw InvalidInput("fe_fi_bound: gamma must be positive");
  const double a = sp.alpha_n();
  if (a >= 1) throw DomainError("fe_fi_bound: alpha_n >= 1");
  const double b = sp.b_gamma();
  const double ln = std::log(sp.n);
  const double total = (sp.p * sp.k + (sp.p - 1) * (sp.k - 1)) * std::exp(-b * ln) +
                       sp.p * std::exp(-b * ln / ((1 - a) * (1 - a))) +
                       (sp.k - 1) * std::exp(-b * ln / ((1 + a) * (1 + a)));
  return std::min(total, 1.0);
}

struct DecompReport {
  double a_norm = 0, b_norm = 0, c_norm = 0, e_norm = 0;
  double u_norm2 = 0;  // |u^1|^2, u^1 = sigma Z^T v^1 / n
  double tau_p = 0;    // cosine between rho^1 and u^1
  double c_ratio = 0;  // p / n
  double predicted_c_norm = 0;
  double predicted_u_norm2 = 0;
  double predicted_e_bound = 0;
};

/// Splits S - E S into factor (A), cross (B) and noise (C) terms using the
/// latents regenerated from the model seed.
inline DecompReport decompose_covariance(const SignalMatrix& x, const ModelSpec& model,
                                         const EigenOptions& options = {}) {
  const LatentSample ls = sample_with_latents(model);
  if (x.n() != model.n || x.p() != model.p()) throw InvalidInput("decompose_covariance: dimensions differ from model");
  const double scale = std::max(1.0, ls.x.data.cwiseAbs().maxCoeff());
  if ((x.data - ls.x.data).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("decompose_covariance: data was not generated by this model");
  }
  const Eigen::Index n = model.n, p = model.p(), m = model.m();
  const double nd = static_cast<double>(n);
  const double sigma = model.sigma;
  const Matrix& rho = model.components;

  const Matrix vs = ls.v.transpose() * ls.v / nd - Matrix::Identity(m, m);
  const Matrix a = rho * vs * rho.transpose();

  const Matrix u = sigma * ls.z.transpose() * ls.v / nd;  // p x m, column j is u^j
  const Matrix ru = rho * u.transpose();
  const Matrix b = ru + ru.transpose();

  Matrix c = Matrix::Zero(p, p);
  if (sigma != 0.0) {
    c.selfadjointView<Eigen::Lower>().rankUpdate(ls.z.transpose(), sigma * sigma / nd);
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
    c.diagonal().array() -= sigma * sigma;
  }

  DecompReport r;
  r.a_norm = spectral_norm(SymMatrix(a), options);
  r.b_norm = sigma == 0.0 ? 0.0 : spectral_norm(SymMatrix(b), options);
  r.c_norm = sigma == 0.0 ? 0.0 : spectral_norm(SymMatrix(c), options);
  r.e_norm = spectral_norm(SymMatrix(a + b + c), options);
  r.u_norm2 = u.col(0).squaredNorm();
  const double rn = rho.col(0).norm();
  const double un = u.col(0).norm();
  r.tau_p = (rn > 0 && un > 0) ? rho.col(0).dot(u.col(0)) / (rn * un) : 0.0;
  r.c_ratio = static_cast<double>(p) / nd;
  const double rc = std::sqrt(r.c_ratio);
  r.predicted_c_norm = sigma * sigma * (r.c_ratio + 2.0 * rc);
  r.predicted_u_norm2 = sigma * sigma * r.c_ratio;
  double rho_plus = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) rho_plus += rho.col(j).norm();
  r.predicted_e_bound = sigma * rc * rho_plus + r.predicted_c_norm;
  return r;
}

}  // namespace spca
