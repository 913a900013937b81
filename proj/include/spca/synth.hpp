#pragma once

// Test targets and Gaussian factor-model sampling.

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spca/error.hpp"
#include "spca/linalg.hpp"
#include "spca/rng.hpp"

namespace spca {

/// n x p observations, one case per row.
struct SignalMatrix {
  Matrix data;
  bool centered = false;

  SignalMatrix() = default;
  explicit SignalMatrix(Matrix m, bool is_centered = false) : data(std::move(m)), centered(is_centered) {
    if (!data.allFinite()) throw InvalidInput("SignalMatrix: non-finite entries");
  }

  Eigen::Index n() const noexcept { return data.rows(); }
  Eigen::Index p() const noexcept { return data.cols(); }

  /// Copy with column means removed.
  SignalMatrix centered_copy() const {
    if (centered) return *this;
    Matrix m = data.rowwise() - data.colwise().mean();
    return SignalMatrix(std::move(m), true);
  }
};

namespace detail {

inline double log_beta_density(double t, double a, double b) {
  if (t <= 0.0 || t >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(t) +
         (b - 1.0) * std::log1p(-t);
}

inline Vector scale_to_norm(Vector v, double target_norm) {
  const double nv = v.norm();
  if (!(nv > 0) || !std::isfinite(nv)) throw InternalError("target has zero or non-finite norm");
  v *= target_norm / nv;
  if (!v.allFinite()) throw InternalError("target has non-finite entries");
  return v;
}

}  // namespace detail

/// 0.7 B(1500,3000) + 0.5 B(1200,900) + 0.5 B(600,160) on t = l/p, l = 1..p.
inline Vector three_peak_target(Eigen::Index p, double target_norm) {
  if (p < 8) throw InvalidInput("three_peak_target: p must be at least 8");
  if (!(target_norm > 0)) throw InvalidInput("three_peak_target: target_norm must be positive");
  struct Peak {
    double weight, a, b;
  };
  constexpr Peak peaks[] = {{0.7, 1500, 3000}, {0.5, 1200, 900}, {0.5, 600, 160}};
  Vector f = Vector::Zero(p);
  for (Eigen::Index l = 1; l <= p; ++l) {
    const double t = static_cast<double>(l) / static_cast<double>(p);
    double sum = 0.0;
    for (const auto& pk : peaks) sum += pk.weight * std::exp(detail::log_beta_density(t, pk.a, pk.b));
    f(l - 1) = sum;
  }
  return detail::scale_to_norm(std::move(f), target_norm);
}

struct Breakpoint {
  double position;  // fraction of the domain where the level starts
  double level;
};

inline const std::vector<Breakpoint>& default_step_breakpoints() {
  static const std::vector<Breakpoint> bp{{0.0, 0.0}, {0.2, 1.0}, {0.4, -0.6}, {0.6, 0.8}, {0.8, 0.0}};
  return bp;
}

inline constexpr double kStepNorm = 24.82;

/// Piecewise-constant target on t = l/p; t below the first position takes the first level.
inline Vector step_target(Eigen::Index p, const std::vector<Breakpoint>& breakpoints, double target_norm) {
  if (breakpoints.empty()) throw InvalidInput("step_target: no breakpoints");
  if (p < 1) throw InvalidInput("step_target: p must be positive");
  if (!(target_norm > 0)) throw InvalidInput("step_target: target_norm must be positive");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double x = breakpoints[i].position;
    if (x < 0.0 || x > 1.0) throw InvalidInput("step_target: position outside [0, 1]");
    if (i > 0 && !(x > breakpoints[i - 1].position)) {
      throw InvalidInput("step_target: positions must be strictly increasing");
    }
  }
  Vector f(p);
  for (Eigen::Index l = 1; l <= p; ++l) {
    const double t = static_cast<double>(l) / static_cast<double>(p);
    double level = breakpoints.front().level;
    for (const auto& bp : breakpoints) {
      if (bp.position <= t) level = bp.level;
    }
    f(l - 1) = level;
  }
  return detail::scale_to_norm(std::move(f), target_norm);
}

/// x_i = sum_j v_i^j rho^j + sigma z_i with standard normal v, z.
struct ModelSpec {
  Matrix components;  // p x m, column j is rho^j
  double sigma = 1.0;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;

  Eigen::Index p() const noexcept { return components.rows(); }
  Eigen::Index m() const noexcept { return components.cols(); }

  static ModelSpec single(Vector rho, double sigma, Eigen::Index n, std::uint64_t seed) {
    ModelSpec s{Matrix(rho), sigma, n, seed};
    s.validate();
    return s;
  }

  void validate() const {
    if (n < 1) throw InvalidInput("ModelSpec: n must be positive");
    if (components.rows() < 1 || components.cols() < 1) throw InvalidInput("ModelSpec: no components");
    if (!(sigma >= 0) || !std::isfinite(sigma)) throw InvalidInput("ModelSpec: sigma must be finite and >= 0");
    if (!components.allFinite()) throw InvalidInput("ModelSpec: non-finite component");
    const double n1 = components.col(0).norm();
    for (Eigen::Index j = 1; j < m(); ++j) {
      const double nj = components.col(j).norm();
      if (std::abs(components.col(0).dot(components.col(j))) > 1e-10 * n1 * nj) {
        throw InvalidInput("ModelSpec: components are not orthogonal to the first");
      }
      if (!(nj < n1)) throw InvalidInput("ModelSpec: first component norm must strictly dominate");
      if (nj > components.col(j - 1).norm()) throw InvalidInput("ModelSpec: component norms must not increase");
    }
  }
};

/// Sample together with the latent factors that produced it.
struct LatentSample {
  SignalMatrix x;
  Matrix v;  // n x m factor scores
  Matrix z;  // n x p unit noise
};

/// Case i draws from Philox stream i: normals 0..m-1 are v_i, the next p are z_i.
inline LatentSample sample_with_latents(const ModelSpec& model) {
  model.validate();
  const Eigen::Index n = model.n, p = model.p(), m = model.m();
  Matrix v(n, m);
  Matrix z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Stream s(model.seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < m; ++j) v(i, j) = s.normal();
    for (Eigen::Index l = 0; l < p; ++l) z(i, l) = s.normal();
  }
  Matrix x = v * model.components.transpose();
  if (model.sigma != 0.0) x.noalias() += model.sigma * z;
  return {SignalMatrix(std::move(x)), std::move(v), std::move(z)};
}

inline SignalMatrix sample(const ModelSpec& model) { return sample_with_latents(model).x; }

inline void to_json(nlohmann::json& j, const ModelSpec& s) {
  std::vector<std::vector<double>> comps;
  for (Eigen::Index c = 0; c < s.m(); ++c) {
    comps.emplace_back(s.components.col(c).data(), s.components.col(c).data() + s.p());
  }
  j = nlohmann::json{{"components", comps}, {"sigma", s.sigma}, {"n", s.n}, {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, ModelSpec& s) {
  const auto comps = j.at("components").get<std::vector<std::vector<double>>>();
  if (comps.empty()) throw InvalidInput("ModelSpec: no components");
  const auto p = static_cast<Eigen::Index>(comps.front().size());
  s.components.resize(p, static_cast<Eigen::Index>(comps.size()));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (static_cast<Eigen::Index>(comps[c].size()) != p) throw InvalidInput("ModelSpec: ragged components");
    s.components.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Vector>(comps[c].data(), p);
  }
  s.sigma = j.value("sigma", 1.0);
  s.n = j.at("n").get<Eigen::Index>();
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
}

}  // namespace spca
