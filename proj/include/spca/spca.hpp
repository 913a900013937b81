#pragma once

// Sparse principal components: transform to a wavelet basis, keep the
// high-variance coordinates, run PCA on them, threshold, transform back.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "spca/baselines.hpp"
#include "spca/error.hpp"
#include "spca/linalg.hpp"
#include "spca/stats.hpp"
#include "spca/synth.hpp"
#include "spca/wavelet.hpp"

namespace spca {

using IndexSet = std::vector<Eigen::Index>;

/// Per-coordinate second moments (or variances when `center`), divisor n.
inline Vector sample_variances(const Eigen::Ref<const Matrix>& x, bool center = false) {
  const Eigen::Index n = x.rows();
  if (n < (center ? 2 : 1)) throw InvalidInput("sample_variances: too few cases");
  if (!center) return x.colwise().squaredNorm().transpose() / static_cast<double>(n);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return (x.rowwise() - mean).colwise().squaredNorm().transpose() / static_cast<double>(n);
}

inline Vector sample_variances(const SignalMatrix& x, bool center = false) {
  return sample_variances(x.data, center && !x.centered);
}

/// Coordinates ordered by decreasing variance, ties to the lower index.
inline IndexSet rank_by_variance(const Eigen::Ref<const Vector>& variances) {
  IndexSet idx(static_cast<std::size_t>(variances.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return variances(a) > variances(b); });
  return idx;
}

/// Noise level: median of the coordinate variances.
inline double estimate_sigma2(const Eigen::Ref<const Vector>& variances) {
  if (variances.size() == 0) throw InvalidInput("estimate_sigma2: no variances");
  return median(variances);
}

/// Signal energy: total excess of the variances over their median.
inline double estimate_rho_norm2(const Eigen::Ref<const Vector>& variances) {
  const double med = estimate_sigma2(variances);
  return (variances.array() - med).sum();
}

/// Approximate standard error of the coordinates of a unit principal component.
inline double tau_hat(double rho_norm2, double sigma2, Eigen::Index n) {
  if (!(rho_norm2 > 0)) throw InvalidInput("tau_hat: rho_norm2 must be positive");
  if (!(sigma2 >= 0)) throw InvalidInput("tau_hat: sigma2 must be nonnegative");
  if (n < 1) throw InvalidInput("tau_hat: n must be positive");
  return std::sqrt(sigma2) * std::sqrt(rho_norm2 + sigma2) / (rho_norm2 * std::sqrt(static_cast<double>(n)));
}

/// 1 + gamma sqrt(log n / n).
inline double rule_a_multiplier(double gamma, Eigen::Index n) {
  if (n < 2) throw InvalidInput("select_rule_a: n must be at least 2");
  const double nd = static_cast<double>(n);
  return 1.0 + gamma * std::sqrt(std::log(nd) / nd);
}

struct Selection {
  IndexSet indices;  // by decreasing variance
  Eigen::Index k_hat = 0;
};

/// Coordinates whose variance reaches sigma2 (1 + gamma sqrt(log n / n)).
inline Selection select_rule_a(const Eigen::Ref<const Vector>& variances, double sigma2, double gamma, Eigen::Index n) {
  if (!(sigma2 > 0)) throw InvalidInput("select_rule_a: sigma2 must be positive");
  const double cut = sigma2 * rule_a_multiplier(gamma, n);
  Selection s;
  for (Eigen::Index nu : rank_by_variance(variances)) {
    if (variances(nu) < cut) break;
    s.indices.push_back(nu);
  }
  s.k_hat = static_cast<Eigen::Index>(s.indices.size());
  return s;
}

/// Excess of each ranked variance over the matching upper percentile of
/// sigma2 chi^2_n / n. Rank r (1-based) of p is compared with the r/(p+1)
/// upper point, the typical size of the r-th largest of p noise variances.
inline Vector percentile_excess(const Eigen::Ref<const Vector>& variances, const IndexSet& order, double sigma2,
                                Eigen::Index n) {
  const auto p = static_cast<Eigen::Index>(order.size());
  const double nd = static_cast<double>(n);
  Vector excess(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    const double prob = static_cast<double>(r + 1) / static_cast<double>(p + 1);
    const double q = sigma2 * chi2_upper_quantile(nd, prob) / nd;
    excess(r) = std::max(variances(order[static_cast<std::size_t>(r)]) - q, 0.0);
  }
  return excess;
}

/// Smallest top-k set capturing a fraction w of the total percentile excess.
inline Selection select_rule_b(const Eigen::Ref<const Vector>& variances, double sigma2, Eigen::Index n, double w) {
  if (!(w > 0 && w <= 1)) throw InvalidInput("select_rule_b: w must lie in (0, 1]");
  if (!(sigma2 >= 0)) throw InvalidInput("select_rule_b: sigma2 must be nonnegative");
  if (n < 1) throw InvalidInput("select_rule_b: n must be positive");
  const IndexSet order = rank_by_variance(variances);
  const Vector excess = percentile_excess(variances, order, sigma2, n);
  const double total = excess.sum();
  Selection s;
  if (!(total > 0)) return s;
  double cum = 0.0;
  Eigen::Index k = 0;
  const double target = w * total;
  while (k < excess.size()) {
    cum += excess(k++);
    if (cum >= target) break;
  }
  // Exact w = 1 may fall a rounding error short of the total.
  if (w == 1.0) {
    while (k < excess.size() && excess(k) > 0) ++k;
  }
  s.indices.assign(order.begin(), order.begin() + k);
  s.k_hat = k;
  return s;
}

inline Selection select_top_k(const Eigen::Ref<const Vector>& variances, Eigen::Index k) {
  if (k < 1 || k > variances.size()) throw InvalidInput("select_top_k: k outside [1, p]");
  const IndexSet order = rank_by_variance(variances);
  return {IndexSet(order.begin(), order.begin() + k), k};
}

struct SelectionConfig {
  enum class Rule { FixedK, NoiseExceed, QuantileExcess };
  Rule rule = Rule::QuantileExcess;
  Eigen::Index k = 0;
  double gamma = std::sqrt(12.0);
  double w = 0.995;
  std::optional<double> sigma2;  // known noise level; estimated from the variances otherwise

  static SelectionConfig fixed_k(Eigen::Index k) { return {Rule::FixedK, k}; }
  static SelectionConfig noise_exceed(double gamma) { return {Rule::NoiseExceed, 0, gamma}; }
  static SelectionConfig quantile_excess(double w = 0.995) { return {Rule::QuantileExcess, 0, std::sqrt(12.0), w}; }
};

enum class ThresholdMode { Hard, Soft, None };
enum class DeltaRule { Manual, TauSqrt2LogK, MadBased };

struct ThresholdConfig {
  ThresholdMode mode = ThresholdMode::Hard;
  DeltaRule delta_rule = DeltaRule::TauSqrt2LogK;
  double delta = 0.0;  // used by DeltaRule::Manual

  static ThresholdConfig none() { return {ThresholdMode::None, DeltaRule::Manual, 0.0}; }
  static ThresholdConfig manual(ThresholdMode mode, double delta) { return {mode, DeltaRule::Manual, delta}; }
};

/// Threshold level for a coefficient vector of length-k support.
inline double threshold_delta(const Eigen::Ref<const Vector>& coeffs, const ThresholdConfig& cfg, Eigen::Index k,
                              double tau) {
  switch (cfg.delta_rule) {
    case DeltaRule::Manual:
      if (!(cfg.delta >= 0)) throw InvalidInput("threshold: manual delta must be >= 0");
      return cfg.delta;
    case DeltaRule::TauSqrt2LogK:
      if (k < 1) throw InvalidInput("threshold: k must be >= 1");
      return tau * std::sqrt(2.0 * std::log(static_cast<double>(k)));
    case DeltaRule::MadBased:
      if (k < 1) throw InvalidInput("threshold: k must be >= 1");
      if (coeffs.size() == 0) return 0.0;
      return mad(coeffs) / 0.6745 * std::sqrt(2.0 * std::log(static_cast<double>(k)));
  }
  throw InternalError("threshold: unknown delta rule");
}

inline double hard_threshold(double x, double delta) { return std::abs(x) >= delta ? x : 0.0; }

inline double soft_threshold(double x, double delta) {
  const double mag = std::abs(x) - delta;
  return mag > 0 ? std::copysign(mag, x) : 0.0;
}

inline Vector threshold(const Eigen::Ref<const Vector>& coeffs, const ThresholdConfig& cfg, Eigen::Index k,
                        double tau) {
  if (cfg.mode == ThresholdMode::None) return coeffs;
  const double delta = threshold_delta(coeffs, cfg, k, tau);
  Vector out(coeffs.size());
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    out(i) = cfg.mode == ThresholdMode::Hard ? hard_threshold(coeffs(i), delta) : soft_threshold(coeffs(i), delta);
  }
  return out;
}

struct SpcaOptions {
  bool center = false;
  EigenOptions eigen{};
};

struct SpcaResult {
  IndexSet selected;
  Eigen::Index k_hat = 0;
  EigenResult reduced_eigen;  // eigenpairs of the k_hat x k_hat reduced covariance
  Matrix coefficients;        // p x m, thresholded, zero off the selection
  Matrix components;          // p x m, signal domain
  Vector variances;
  double sigma2_hat = 0.0;
  double rho_norm2_hat = 0.0;
  double tau = 0.0;                   // 0 when the threshold does not need it
  std::vector<double> delta;          // per component
  std::vector<double> norm_before;    // |reduced eigenvector|
  std::vector<double> norm_after;     // after thresholding
};

/// Variances of the wavelet coordinates, for callers that need them before selection.
inline Vector wavelet_variances(const SignalMatrix& x, const WaveletSpec& wavelet, bool center = false) {
  return sample_variances(dwt_rows(x.data, wavelet), center && !x.centered);
}

inline SpcaResult sparse_pca(const SignalMatrix& x, const WaveletSpec& wavelet, const SelectionConfig& selection,
                             const ThresholdConfig& thresholding, Eigen::Index n_components,
                             const SpcaOptions& options = {}) {
  if (n_components < 1) throw InvalidInput("sparse_pca: n_components must be positive");
  const bool center = options.center && !x.centered;
  const Eigen::Index n = x.n(), p = x.p();

  Matrix coords = dwt_rows(x.data, wavelet);
  if (center) coords = coords.rowwise() - coords.colwise().mean();

  SpcaResult r;
  r.variances = sample_variances(coords, false);
  r.sigma2_hat = estimate_sigma2(r.variances);
  r.rho_norm2_hat = estimate_rho_norm2(r.variances);
  const double sigma2 = selection.sigma2.value_or(r.sigma2_hat);

  Selection sel;
  switch (selection.rule) {
    case SelectionConfig::Rule::FixedK: sel = select_top_k(r.variances, selection.k); break;
    case SelectionConfig::Rule::NoiseExceed: sel = select_rule_a(r.variances, sigma2, selection.gamma, n); break;
    case SelectionConfig::Rule::QuantileExcess: sel = select_rule_b(r.variances, sigma2, n, selection.w); break;
  }
  if (sel.k_hat == 0) throw EmptySelection("sparse_pca: no coordinates selected");
  if (n_components > std::min(sel.k_hat, n)) {
    throw InvalidInput("sparse_pca: n_components exceeds the reduced problem size");
  }
  r.selected = std::move(sel.indices);
  r.k_hat = sel.k_hat;

  Matrix reduced(n, r.k_hat);
  for (Eigen::Index j = 0; j < r.k_hat; ++j) reduced.col(j) = coords.col(r.selected[static_cast<std::size_t>(j)]);
  r.reduced_eigen = standard_pca(reduced, n_components, false, PcaRoute::Auto, options.eigen);

  const bool needs_tau =
      thresholding.mode != ThresholdMode::None && thresholding.delta_rule == DeltaRule::TauSqrt2LogK;
  if (needs_tau) r.tau = tau_hat(r.rho_norm2_hat, r.sigma2_hat, n);

  r.coefficients = Matrix::Zero(p, n_components);
  r.components.resize(p, n_components);
  for (Eigen::Index c = 0; c < n_components; ++c) {
    const Vector raw = r.reduced_eigen.vectors.col(c);
    const Vector kept = threshold(raw, thresholding, r.k_hat, r.tau);
    r.delta.push_back(thresholding.mode == ThresholdMode::None ? 0.0
                                                               : threshold_delta(raw, thresholding, r.k_hat, r.tau));
    r.norm_before.push_back(raw.norm());
    r.norm_after.push_back(kept.norm());
    for (Eigen::Index j = 0; j < r.k_hat; ++j) r.coefficients(r.selected[static_cast<std::size_t>(j)], c) = kept(j);
    Vector comp = dwt_inverse(r.coefficients.col(c), wavelet);
    const Vector unsigned_comp = comp;
    canonical_sign(comp);
    if (comp.dot(unsigned_comp) < 0) r.coefficients.col(c) *= -1.0;
    r.components.col(c) = comp;
  }
  return r;
}

}  // namespace spca
