// Library walkthrough: sample the three-peak model, estimate its leading
// component with sparse and standard PCA, and compare the errors.

#include <cstdio>

#include "spca.hpp"

int main() {
  const Eigen::Index p = 1024, n = 512;
  const spca::Vector rho = spca::three_peak_target(p, 10.0);
  const auto model = spca::ModelSpec::single(rho, 1.0, n, 2024);
  const spca::SignalMatrix x = spca::sample(model);

  const auto sparse = spca::sparse_pca(x, spca::WaveletSpec{}, spca::SelectionConfig::quantile_excess(0.995),
                                       spca::ThresholdConfig{}, 1);
  const auto standard = spca::standard_pca(x, 1);

  std::printf("p = %ld, n = %ld\n", static_cast<long>(p), static_cast<long>(n));
  std::printf("noise level estimate   %.4f\n", std::sqrt(sparse.sigma2_hat));
  std::printf("signal norm estimate   %.3f\n", std::sqrt(sparse.rho_norm2_hat));
  std::printf("coordinates selected   %ld of %ld\n", static_cast<long>(sparse.k_hat), static_cast<long>(p));
  std::printf("dist, sparse PCA       %.4f\n", spca::dist(sparse.components.col(0), rho));
  std::printf("dist, standard PCA     %.4f\n", spca::dist(standard.vectors.col(0), rho));
  std::printf("zeta bound (c = %.2f)  %.4f\n", double(p) / n, spca::zeta_bound(10.0, double(p) / n));
  return 0;
}
