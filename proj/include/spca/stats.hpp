#pragma once

// Small descriptive statistics and chi-square helpers.

#include <boost/math/distributions/chi_squared.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spca/error.hpp"

namespace spca {

/// Median; mean of the two middle values for even counts.
inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidInput("median of empty sequence");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline double median(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return median(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Linear-interpolated quantile (type 7), prob in [0, 1].
inline double quantile(std::vector<double> v, double prob) {
  if (v.empty()) throw InvalidInput("quantile of empty sequence");
  std::sort(v.begin(), v.end());
  const double h = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Median absolute deviation about the median (unscaled).
inline double mad(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = median(v);
  return median(Eigen::VectorXd((v.array() - m).abs()));
}

struct Summary {
  double mean = 0, sd = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
  std::size_t count = 0;
};

/// Summary with the n-1 standard deviation (0 for a single value).
inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  s.count = v.size();
  if (v.empty()) return s;
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.median = median(v);
  s.q1 = quantile(v, 0.25);
  s.q3 = quantile(v, 0.75);
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

/// x with P(chi^2_dof > x) = upper_prob.
inline double chi2_upper_quantile(double dof, double upper_prob) {
  if (!(dof > 0)) throw InvalidInput("chi-square degrees of freedom must be positive");
  if (upper_prob <= 0) return std::numeric_limits<double>::infinity();
  if (upper_prob >= 1) return 0.0;
  const boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, upper_prob));
}

inline double chi2_cdf(double dof, double x) {
  if (x <= 0) return 0.0;
  return boost::math::cdf(boost::math::chi_squared(dof), x);
}

}  // namespace spca
