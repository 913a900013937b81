#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spca/linalg.hpp"
#include "spca/synth.hpp"

using namespace spca;

namespace {

/// Lanczos (g = 7, 9 terms) log-gamma for x >= 0.5.
double lanczos_lgamma(double x) {
  static const double c[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  x -= 1.0;
  double a = c[0];
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  const double t = x + 7.5;
  return 0.5 * std::log(2 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

double beta_density(double t, double a, double b) {
  if (t <= 0 || t >= 1) return 0.0;
  return std::exp(lanczos_lgamma(a + b) - lanczos_lgamma(a) - lanczos_lgamma(b) + (a - 1) * std::log(t) +
                  (b - 1) * std::log(1 - t));
}

}  // namespace

TEST(ThreePeak, NormAndSign) {
  const Vector rho = three_peak_target(2048, 10.0);
  EXPECT_NEAR(rho.norm(), 10.0, 1e-10);
  EXPECT_GE(rho.minCoeff(), 0.0);
  EXPECT_GE(three_peak_target(100, 3.0).minCoeff(), 0.0);
}

TEST(ThreePeak, MatchesIndependentLogGamma) {
  const Eigen::Index p = 2048;
  Vector oracle(p);
  for (Eigen::Index l = 1; l <= p; ++l) {
    const double t = static_cast<double>(l) / p;
    oracle(l - 1) =
        0.7 * beta_density(t, 1500, 3000) + 0.5 * beta_density(t, 1200, 900) + 0.5 * beta_density(t, 600, 160);
  }
  oracle *= 10.0 / oracle.norm();
  const Vector rho = three_peak_target(p, 10.0);
  for (Eigen::Index l = 0; l < p; ++l) {
    if (oracle(l) > 1e-250) {
      EXPECT_NEAR(rho(l) / oracle(l), 1.0, 1e-8) << l;
    } else {
      EXPECT_LE(rho(l), 1e-249);
    }
  }
}

TEST(StepTarget, Examples) {
  const Vector flat = step_target(4, {{0.0, 1.0}}, 5.0);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(flat(i), 2.5, 1e-14);

  const Vector rho = step_target(2048, default_step_breakpoints(), kStepNorm);
  EXPECT_NEAR(rho.norm(), 24.82, 1e-10);
  std::set<double> values(rho.data(), rho.data() + rho.size());
  std::set<double> levels;
  for (const auto& bp : default_step_breakpoints()) levels.insert(bp.level);
  EXPECT_EQ(values.size(), levels.size());
}

TEST(StepTarget, RejectsBadBreakpoints) {
  EXPECT_THROW(step_target(8, {}, 1.0), InvalidInput);
  EXPECT_THROW(step_target(8, {{0.5, 1.0}, {0.2, 2.0}}, 1.0), InvalidInput);
  EXPECT_THROW(step_target(8, {{0.0, 0.0}}, 1.0), InternalError);
}

TEST(Sample, NoiselessRowsAreMultiplesOfRho) {
  const Vector rho = three_peak_target(64, 10.0);
  const SignalMatrix x = sample(ModelSpec::single(rho, 0.0, 30, 5));
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    const Vector row = x.data.row(i).transpose();
    if (row.norm() > 0) EXPECT_LE(dist(row, rho), 1e-12);
  }
}

TEST(Sample, PureNoiseCovarianceNearIdentity) {
  const SignalMatrix x = sample(ModelSpec::single(Vector::Zero(4), 1.0, 20000, 6));
  const Matrix s = x.data.transpose() * x.data / 20000.0;
  EXPECT_LE((s - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 5e-2);
}

TEST(Sample, ProjectionVariance) {
  const Vector rho = three_peak_target(32, 10.0);
  const SignalMatrix x = sample(ModelSpec::single(rho, 1.0, 20000, 7));
  const Vector proj = x.data * rho.normalized();
  EXPECT_NEAR(proj.squaredNorm() / 20000.0, 101.0, 0.02 * 101.0);
}

TEST(Sample, ReproducibleForSeed) {
  const Vector rho = three_peak_target(16, 2.0);
  const auto a = sample(ModelSpec::single(rho, 1.0, 10, 42));
  const auto b = sample(ModelSpec::single(rho, 1.0, 10, 42));
  const auto c = sample(ModelSpec::single(rho, 1.0, 10, 43));
  EXPECT_EQ(a.data, b.data);
  EXPECT_NE(a.data, c.data);
}

TEST(Sample, LatentsReproduceData) {
  Matrix comps = Matrix::Zero(8, 2);
  comps(0, 0) = 3;
  comps(1, 1) = 1;
  const ModelSpec m{comps, 0.5, 12, 9};
  const auto ls = sample_with_latents(m);
  EXPECT_LE((ls.x.data - (ls.v * comps.transpose() + 0.5 * ls.z)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ModelSpec, Validation) {
  Matrix comps = Matrix::Zero(4, 2);
  comps(0, 0) = 1;
  comps(0, 1) = 0.5;
  EXPECT_THROW((ModelSpec{comps, 1.0, 5, 0}.validate()), InvalidInput);  // not orthogonal
  comps(0, 1) = 0;
  comps(1, 1) = 2;
  EXPECT_THROW((ModelSpec{comps, 1.0, 5, 0}.validate()), InvalidInput);  // second dominates
  EXPECT_THROW(ModelSpec::single(Vector::Ones(3), -1.0, 5, 0), InvalidInput);
  EXPECT_THROW(ModelSpec::single(Vector::Ones(3), 1.0, 0, 0), InvalidInput);
}

TEST(ModelSpec, JsonRoundTrip) {
  Matrix comps = Matrix::Zero(5, 2);
  comps(0, 0) = 2.5;
  comps(3, 1) = -1.25;
  const ModelSpec m{comps, 0.75, 17, 123456789012345ull};
  const ModelSpec back = nlohmann::json(m).get<ModelSpec>();
  EXPECT_EQ(back.components, m.components);
  EXPECT_EQ(back.sigma, m.sigma);
  EXPECT_EQ(back.n, m.n);
  EXPECT_EQ(back.seed, m.seed);
}

TEST(SignalMatrix, CenteredCopy) {
  Matrix m(3, 2);
  m << 1, 2, 3, 4, 5, 9;
  const SignalMatrix c = SignalMatrix(m).centered_copy();
  EXPECT_TRUE(c.centered);
  EXPECT_LE(c.data.colwise().sum().cwiseAbs().maxCoeff(), 1e-14);
}
