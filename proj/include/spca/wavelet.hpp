#pragma once

// Periodised orthonormal discrete wavelet transform.
//
// Coefficient layout for `levels` = L is coarse to fine:
//   [ approx_L | detail_L | detail_{L-1} | ... | detail_1 ]
// where approx_L and detail_L hold p / 2^L entries and detail_1 holds p / 2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "spca/error.hpp"
#include "spca/linalg.hpp"

namespace spca {

enum class WaveletFamily {
  Identity,  // no transform; coordinates are the signal samples
  Haar,
  Daubechies4,
  Daubechies8,
};

struct WaveletSpec {
  WaveletFamily family = WaveletFamily::Daubechies4;
  int levels = 3;
};

inline std::string_view to_string(WaveletFamily f) {
  switch (f) {
    case WaveletFamily::Identity: return "identity";
    case WaveletFamily::Haar: return "haar";
    case WaveletFamily::Daubechies4: return "d4";
    case WaveletFamily::Daubechies8: return "d8";
  }
  return "?";
}

inline WaveletFamily parse_wavelet_family(std::string_view s) {
  if (s == "identity") return WaveletFamily::Identity;
  if (s == "haar") return WaveletFamily::Haar;
  if (s == "d4" || s == "daubechies4") return WaveletFamily::Daubechies4;
  if (s == "d8" || s == "daubechies8") return WaveletFamily::Daubechies8;
  throw InvalidInput("unknown wavelet family '" + std::string(s) + "'");
}

/// Low-pass analysis filter of the family.
inline const std::vector<double>& lowpass_filter(WaveletFamily f) {
  static const std::vector<double> haar{M_SQRT1_2, M_SQRT1_2};
  static const std::vector<double> d4 = [] {
    const double s3 = std::sqrt(3.0);
    const double k = 4.0 * std::sqrt(2.0);
    return std::vector<double>{(1 + s3) / k, (3 + s3) / k, (3 - s3) / k, (1 - s3) / k};
  }();
  // Four vanishing moments.
  static const std::vector<double> d8{
      0.23037781330889650071,  0.71484657055291564708,  0.63088076792985890796,
      -0.0279837694168598541,  -0.18703481171909308407, 0.030841381835560763586,
      0.032883011666885199732, -0.010597401785069032097};
  switch (f) {
    case WaveletFamily::Haar: return haar;
    case WaveletFamily::Daubechies4: return d4;
    case WaveletFamily::Daubechies8: return d8;
    case WaveletFamily::Identity: break;
  }
  throw InvalidInput("identity basis has no filter");
}

/// Quadrature mirror high-pass filter g[m] = (-1)^m h[L-1-m].
inline std::vector<double> highpass_filter(const std::vector<double>& h) {
  const std::size_t len = h.size();
  std::vector<double> g(len);
  for (std::size_t m = 0; m < len; ++m) g[m] = (m % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - m];
  return g;
}

/// Largest J with 2^J dividing p.
inline int dyadic_depth(Eigen::Index p) {
  int j = 0;
  while (p > 0 && p % 2 == 0) {
    p /= 2;
    ++j;
  }
  return j;
}

inline void validate_length(Eigen::Index p, const WaveletSpec& spec) {
  if (spec.family == WaveletFamily::Identity) return;
  if (spec.levels < 1) throw InvalidInput("wavelet levels must be positive");
  if (p < 2 || dyadic_depth(p) < spec.levels) {
    throw InvalidLength("signal length " + std::to_string(p) + " is not divisible by 2^" +
                        std::to_string(spec.levels));
  }
}

namespace detail {

// One analysis step on x[0..n): approx -> out[0..n/2), detail -> out[n/2..n).
inline void analysis_step(const double* x, double* out, Eigen::Index n, const std::vector<double>& h,
                          const std::vector<double>& g) {
  const Eigen::Index half = n / 2;
  const auto taps = static_cast<Eigen::Index>(h.size());
  for (Eigen::Index k = 0; k < half; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (Eigen::Index m = 0; m < taps; ++m) {
      const double v = x[(2 * k + m) % n];
      a += h[static_cast<std::size_t>(m)] * v;
      d += g[static_cast<std::size_t>(m)] * v;
    }
    out[k] = a;
    out[half + k] = d;
  }
}

// Inverse of analysis_step: approx in c[0..n/2), detail in c[n/2..n).
inline void synthesis_step(const double* c, double* x, Eigen::Index n, const std::vector<double>& h,
                           const std::vector<double>& g) {
  const Eigen::Index half = n / 2;
  const auto taps = static_cast<Eigen::Index>(h.size());
  std::fill(x, x + n, 0.0);
  for (Eigen::Index k = 0; k < half; ++k) {
    const double a = c[k];
    const double d = c[half + k];
    for (Eigen::Index m = 0; m < taps; ++m) {
      x[(2 * k + m) % n] += h[static_cast<std::size_t>(m)] * a + g[static_cast<std::size_t>(m)] * d;
    }
  }
}

}  // namespace detail

/// Forward transform of one signal.
inline Vector dwt_forward(const Eigen::Ref<const Vector>& signal, const WaveletSpec& spec) {
  const Eigen::Index p = signal.size();
  validate_length(p, spec);
  if (spec.family == WaveletFamily::Identity) return signal;
  const auto& h = lowpass_filter(spec.family);
  const auto g = highpass_filter(h);
  Vector coeffs = signal;
  std::vector<double> scratch(static_cast<std::size_t>(p));
  Eigen::Index n = p;
  for (int level = 0; level < spec.levels; ++level) {
    detail::analysis_step(coeffs.data(), scratch.data(), n, h, g);
    std::copy(scratch.begin(), scratch.begin() + n, coeffs.data());
    n /= 2;
  }
  return coeffs;
}

/// Inverse transform of one coefficient vector.
inline Vector dwt_inverse(const Eigen::Ref<const Vector>& coeffs, const WaveletSpec& spec) {
  const Eigen::Index p = coeffs.size();
  validate_length(p, spec);
  if (spec.family == WaveletFamily::Identity) return coeffs;
  const auto& h = lowpass_filter(spec.family);
  const auto g = highpass_filter(h);
  Vector signal = coeffs;
  std::vector<double> scratch(static_cast<std::size_t>(p));
  Eigen::Index n = p >> (spec.levels - 1);
  for (int level = 0; level < spec.levels; ++level) {
    detail::synthesis_step(signal.data(), scratch.data(), n, h, g);
    std::copy(scratch.begin(), scratch.begin() + n, signal.data());
    n *= 2;
  }
  return signal;
}

/// Transforms every row of X (rows are cases).
inline Matrix dwt_rows(const Eigen::Ref<const Matrix>& x, const WaveletSpec& spec) {
  validate_length(x.cols(), spec);
  if (spec.family == WaveletFamily::Identity) return x;
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = dwt_forward(x.row(i).transpose(), spec).transpose();
  return out;
}

/// Explicit p x p transform matrix W with coeffs = W * signal.
inline Matrix transform_matrix(Eigen::Index p, const WaveletSpec& spec) {
  Matrix w(p, p);
  for (Eigen::Index j = 0; j < p; ++j) w.col(j) = dwt_forward(Vector::Unit(p, j), spec);
  return w;
}

/// Smallest C with |coeff|_(nu) <= C nu^(-1/q) for every rank nu.
inline double weak_lq_radius(const Eigen::Ref<const Vector>& coeffs, double q) {
  if (!(q > 0)) throw InvalidInput("weak_lq_radius: q must be positive");
  std::vector<double> mags(static_cast<std::size_t>(coeffs.size()));
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(coeffs(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double radius = 0.0;
  for (std::size_t nu = 0; nu < mags.size(); ++nu) {
    radius = std::max(radius, mags[nu] * std::pow(static_cast<double>(nu + 1), 1.0 / q));
  }
  return radius;
}

}  // namespace spca
