#pragma once

// Monte Carlo experiments: ASE comparison, consistency sweep, selection
// error frequencies and estimator histograms.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "spca/baselines.hpp"
#include "spca/bench/config.hpp"
#include "spca/bench/pool.hpp"
#include "spca/bench/report.hpp"
#include "spca/bench/svg.hpp"
#include "spca/linalg.hpp"
#include "spca/rng.hpp"
#include "spca/spca.hpp"
#include "spca/stats.hpp"
#include "spca/synth.hpp"
#include "spca/theory.hpp"

namespace spca::bench {

/// p^-1 |rho_hat - rho|^2 after flipping rho_hat towards rho and rescaling it to |rho|.
inline double ase(const Eigen::Ref<const Vector>& estimate, const Eigen::Ref<const Vector>& truth) {
  if (estimate.size() != truth.size()) throw InvalidInput("ase: length mismatch");
  const double en = estimate.norm();
  if (!(en > 0)) throw InvalidInput("ase: zero estimate");
  Vector aligned = estimate * (truth.norm() / en);
  if (aligned.dot(truth) < 0) aligned = -aligned;
  return (aligned - truth).squaredNorm() / static_cast<double>(truth.size());
}

/// `estimate` flipped and rescaled as in ase().
inline Vector align_to(const Eigen::Ref<const Vector>& estimate, const Eigen::Ref<const Vector>& truth) {
  Vector aligned = estimate * (truth.norm() / estimate.norm());
  if (aligned.dot(truth) < 0) aligned = -aligned;
  return aligned;
}

namespace experiments_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::string lambda_label(double lambda) {
  std::ostringstream o;
  o << "smoothed(" << lambda << ")";
  return o.str();
}

/// A PCA method applied to one sample, returning its first component.
struct Method {
  std::string label;
  std::string kind;  // sparse, sparse_a, standard, smoothed
  std::shared_ptr<const SmoothingOperator> smoother;
};

struct MethodRun {
  Vector estimate;
  std::map<std::string, double> extra;
};

inline std::vector<Method> build_methods(const std::vector<std::string>& names, const std::vector<double>& lambdas,
                                         bool grid_scaled, Eigen::Index p) {
  std::vector<Method> out;
  for (const auto& name : names) {
    if (name == "smoothed") {
      for (double l : lambdas) {
        out.push_back({lambda_label(l), name,
                       std::make_shared<const SmoothingOperator>(p, SmoothedSpec{l, grid_scaled})});
      }
    } else {
      out.push_back({name, name, nullptr});
    }
  }
  return out;
}

inline MethodRun run_method(const Method& m, const SignalMatrix& x, const ExperimentConfig& cfg) {
  if (m.kind == "standard") return {standard_pca(x, 1).vectors.col(0), {}};
  if (m.kind == "smoothed") return {m.smoother->apply(x.data, 1).vectors.col(0), {}};
  const WaveletSpec wavelet = effective_wavelet(cfg.wavelet, x.p());
  SelectionConfig sel = cfg.selection;
  if (m.kind == "sparse_a") sel = SelectionConfig::noise_exceed(cfg.gamma_a);
  const SpcaResult r = sparse_pca(x, wavelet, sel, cfg.threshold, 1);
  return {r.components.col(0),
          {{"k_hat", static_cast<double>(r.k_hat)},
           {"sigma2_hat", r.sigma2_hat},
           {"rho_norm2_hat", r.rho_norm2_hat},
           {"norm_after_threshold", r.norm_after.front()}}};
}

inline void require_some_success(const Report& r) {
  for (const auto& row : r.rows) {
    if (row.ok()) return;
  }
  if (!r.rows.empty()) throw ExperimentFailed(r.experiment + ": every replicate failed; first error: " + r.rows.front().status);
}

inline ReplicateRow failed_row(int rep, std::uint64_t seed, const std::string& method, const std::string& group,
                               const std::exception& e) {
  ReplicateRow row{rep, seed, method, group, {}, std::string("error: ") + e.what()};
  return row;
}

struct ReplicateOutput {
  std::vector<ReplicateRow> rows;
  std::vector<std::pair<std::string, Vector>> estimates;
};

inline Vector model_truth(const ExperimentConfig& cfg) {
  if (cfg.fixture == "custom") return cfg.model->components.col(0);
  return make_target(cfg.fixture, cfg.p, cfg.norm);
}

}  // namespace experiments_detail

/// Average squared error of each method's first component over replicates.
inline Report run_ase(const ExperimentConfig& cfg) {
  using namespace experiments_detail;
  const Vector truth = model_truth(cfg);
  const Eigen::Index p = truth.size();
  const Eigen::Index n = cfg.fixture == "custom" ? cfg.model->n : cfg.n;
  const double sigma = cfg.fixture == "custom" ? cfg.model->sigma : cfg.sigma;
  Matrix components = cfg.fixture == "custom" ? cfg.model->components : Matrix(truth);
  const auto methods = build_methods(cfg.methods, cfg.lambdas, cfg.smoothing_grid_scaled, p);
  const std::string group = cfg.fixture;

  auto outputs = parallel_map<ReplicateOutput>(
      static_cast<std::size_t>(cfg.replicates), resolve_workers(cfg.workers), [&](std::size_t r) {
        const int rep = static_cast<int>(r);
        const std::uint64_t seed = derive_seed(cfg.seed, r);
        const SignalMatrix x = sample(ModelSpec{components, sigma, n, seed});
        ReplicateOutput out;
        for (const auto& m : methods) {
          const auto t0 = Clock::now();
          try {
            MethodRun run = run_method(m, x, cfg);
            ReplicateRow row{rep, seed, m.label, group, std::move(run.extra)};
            row.metrics["ase"] = ase(run.estimate, truth);
            row.metrics["dist"] = dist(run.estimate, truth);
            row.wall_seconds = seconds_since(t0);
            out.rows.push_back(std::move(row));
            if (r == 0) out.estimates.emplace_back(m.label, align_to(run.estimate, truth));
          } catch (const Error& e) {
            out.rows.push_back(failed_row(rep, seed, m.label, group, e));
          }
        }
        return out;
      });

  Report report;
  report.experiment = "ase";
  report.config = config_to_json(cfg);
  for (auto& o : outputs) {
    for (auto& row : o.rows) report.rows.push_back(std::move(row));
  }
  report.summarize_rows();
  require_some_success(report);

  Figure box{"ase_box", "box", "ASE over replicates (" + group + ")", "method", "ASE", true, {}};
  for (const auto& m : methods) box.series.push_back({m.label, {}, report.values(m.label, group, "ase")});
  report.figures.push_back(std::move(box));

  Figure est{"estimates", "line", "First replicate estimates (" + group + ")", "t", "component", false, {}};
  std::vector<double> grid(static_cast<std::size_t>(p));
  for (Eigen::Index l = 0; l < p; ++l) grid[static_cast<std::size_t>(l)] = static_cast<double>(l + 1) / static_cast<double>(p);
  est.series.push_back({"truth", grid, std::vector<double>(truth.data(), truth.data() + p)});
  for (const auto& [label, v] : outputs.front().estimates) {
    est.series.push_back({label, grid, std::vector<double>(v.data(), v.data() + p)});
  }
  report.figures.push_back(std::move(est));

  auto timing = nlohmann::json::object();
  for (const auto& m : methods) {
    std::vector<double> t;
    for (const auto& row : report.rows) {
      if (row.ok() && row.method == m.label) t.push_back(row.wall_seconds);
    }
    if (!t.empty()) timing[m.label] = summarize(t).mean;
  }
  report.tables["mean_wall_seconds"] = timing;
  return report;
}

inline std::string grid_label(Eigen::Index p, Eigen::Index n) {
  return "p=" + std::to_string(p) + ",n=" + std::to_string(n);
}

/// dist(rho_hat, rho) across a grid of (p, n), with the standard-PCA bound.
inline Report run_consistency_sweep(const ExperimentConfig& cfg) {
  using namespace experiments_detail;
  if (cfg.grid.empty()) throw ConfigError("consistency sweep needs a grid");
  Report report;
  report.experiment = "consistency";
  report.config = config_to_json(cfg);
  auto table = nlohmann::json::array();
  std::map<std::string, Series> medians;
  Series zeta_curve{"zeta bound", {}, {}};

  for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
    const auto& gp = cfg.grid[gi];
    const Vector truth = make_target(cfg.fixture == "custom" ? "three-peak" : cfg.fixture, gp.p, cfg.norm);
    const auto methods =
        build_methods(gp.methods.empty() ? cfg.methods : gp.methods, cfg.lambdas, cfg.smoothing_grid_scaled, gp.p);
    const std::string group = grid_label(gp.p, gp.n);
    const std::uint64_t base = derive_seed(cfg.seed, 0x10000 + gi);

    auto outputs = parallel_map<ReplicateOutput>(
        static_cast<std::size_t>(cfg.replicates), resolve_workers(cfg.workers), [&](std::size_t r) {
          const int rep = static_cast<int>(r);
          const std::uint64_t seed = derive_seed(base, r);
          const SignalMatrix x = sample(ModelSpec::single(truth, cfg.sigma, gp.n, seed));
          ReplicateOutput out;
          for (const auto& m : methods) {
            const auto t0 = Clock::now();
            try {
              MethodRun run = run_method(m, x, cfg);
              ReplicateRow row{rep, seed, m.label, group, std::move(run.extra)};
              row.metrics["dist"] = dist(run.estimate, truth);
              row.metrics["ase"] = ase(run.estimate, truth);
              row.wall_seconds = seconds_since(t0);
              out.rows.push_back(std::move(row));
            } catch (const Error& e) {
              out.rows.push_back(failed_row(rep, seed, m.label, group, e));
            }
          }
          return out;
        });
    for (auto& o : outputs) {
      for (auto& row : o.rows) report.rows.push_back(std::move(row));
    }

    const double c = static_cast<double>(gp.p) / static_cast<double>(gp.n);
    const double tau = cfg.sigma > 0 ? truth.norm() / cfg.sigma : std::numeric_limits<double>::infinity();
    const BoundReport zb = std::isfinite(tau) ? assess_zeta(tau, c) : BoundReport{};
    nlohmann::json entry{{"group", group}, {"p", gp.p}, {"n", gp.n}, {"c", c},
                         {"zeta", zb.raw},  {"zeta_informative", zb.informative}};
    for (const auto& m : methods) {
      const auto v = report.values(m.label, group, "dist");
      if (v.empty()) continue;
      const double med = median(v);
      entry["median_dist_" + m.label] = med;
      auto& s = medians[m.label];
      s.label = m.label + " median dist";
      s.x.push_back(c);
      s.y.push_back(med);
    }
    zeta_curve.x.push_back(c);
    zeta_curve.y.push_back(zb.value);
    table.push_back(entry);
  }
  report.summarize_rows();
  require_some_success(report);
  report.tables["grid"] = table;

  Figure fig{"dist_vs_c", "line", "Median dist against p/n", "p/n", "dist", false, {}};
  for (auto& [_, s] : medians) fig.series.push_back(std::move(s));
  fig.series.push_back(std::move(zeta_curve));
  report.figures.push_back(std::move(fig));
  return report;
}

inline std::string profile_label(const SpikeProfile& pr) {
  std::ostringstream o;
  o << "k=" << pr.k << ",p=" << pr.p << ",n=" << pr.n;
  if (pr.variances.empty()) o << ",sd=" << pr.sd_ratio;
  return o.str();
}

/// Frequencies of false exclusion / inclusion when keeping the top k of p sample variances.
inline Report run_selection_mc(const ExperimentConfig& cfg) {
  using namespace experiments_detail;
  std::vector<SpikeProfile> profiles = cfg.profiles;
  if (profiles.empty()) profiles.push_back(SpikeProfile{});
  Report report;
  report.experiment = "selection";
  report.config = config_to_json(cfg);
  auto table = nlohmann::json::array();
  Series empirical{"empirical P(FE or FI)", {}, {}};
  Series bound_series{"bound", {}, {}};

  for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
    const auto& pr = profiles[pi];
    const std::vector<double> pop = pr.population();
    const auto p = static_cast<Eigen::Index>(pop.size());
    const double nd = static_cast<double>(pr.n);
    const double alpha_n = pr.alpha();
    std::vector<double> sorted = pop;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double kth = sorted[static_cast<std::size_t>(pr.k - 1)];
    std::vector<Eigen::Index> in, out;
    for (Eigen::Index l = 0; l < p; ++l) {
      if (pop[static_cast<std::size_t>(l)] >= kth * (1 + alpha_n)) in.push_back(l);
      if (pop[static_cast<std::size_t>(l)] <= kth * (1 - alpha_n)) out.push_back(l);
    }
    const std::string group = profile_label(pr);
    const std::uint64_t base = derive_seed(cfg.seed, 0x20000 + pi);

    auto rows = parallel_map<ReplicateRow>(
        static_cast<std::size_t>(cfg.replicates), resolve_workers(cfg.workers), [&](std::size_t r) {
          const std::uint64_t seed = derive_seed(base, r);
          Stream s(seed, 0);
          std::vector<double> est(static_cast<std::size_t>(p));
          for (Eigen::Index l = 0; l < p; ++l) {
            est[static_cast<std::size_t>(l)] = pop[static_cast<std::size_t>(l)] * s.chi_square(nd) / nd;
          }
          std::vector<double> ranked = est;
          std::nth_element(ranked.begin(), ranked.begin() + (pr.k - 1), ranked.end(), std::greater<>());
          const double cut = ranked[static_cast<std::size_t>(pr.k - 1)];
          bool fe = false, fi = false;
          for (auto l : in) fe = fe || est[static_cast<std::size_t>(l)] < cut;
          for (auto l : out) fi = fi || est[static_cast<std::size_t>(l)] >= cut;
          return ReplicateRow{static_cast<int>(r), seed, "top-k", group,
                              {{"fe", fe ? 1.0 : 0.0}, {"fi", fi ? 1.0 : 0.0}, {"any", (fe || fi) ? 1.0 : 0.0}}};
        });
    for (auto& row : rows) report.rows.push_back(std::move(row));

    const auto any = report.values("top-k", group, "any");
    double freq = 0;
    for (double v : any) freq += v;
    freq /= static_cast<double>(any.size());
    nlohmann::json entry{{"group", group},          {"alpha_n", alpha_n}, {"empirical", freq},
                         {"in_count", in.size()},   {"out_count", out.size()}};
    const double gamma = SelectionBoundParams::gamma_for_alpha(alpha_n, nd);
    if (alpha_n > 0 && alpha_n < 1) {
      const SelectionBoundParams sp{static_cast<double>(p), nd, static_cast<double>(pr.k), gamma};
      const double b = fe_fi_bound(sp);
      entry["gamma"] = gamma;
      entry["b_gamma"] = sp.b_gamma();
      entry["bound"] = b;
      bound_series.x.push_back(static_cast<double>(pi));
      bound_series.y.push_back(b);
    }
    empirical.x.push_back(static_cast<double>(pi));
    empirical.y.push_back(freq);
    table.push_back(entry);
  }
  report.summarize_rows();
  report.tables["profiles"] = table;
  Figure fig{"selection_error", "line", "Selection error: empirical vs bound", "profile", "probability", false,
             {empirical, bound_series}};
  report.figures.push_back(std::move(fig));
  return report;
}

/// Noise level and signal norm estimates over replicates for each fixture.
inline Report run_estimator_hist(const ExperimentConfig& cfg) {
  using namespace experiments_detail;
  Report report;
  report.experiment = "estimators";
  report.config = config_to_json(cfg);
  for (std::size_t fi = 0; fi < cfg.fixtures.size(); ++fi) {
    const auto& fixture = cfg.fixtures[fi];
    const Vector truth = make_target(fixture, cfg.p, cfg.norm);
    const WaveletSpec wavelet = effective_wavelet(cfg.wavelet, cfg.p);
    const std::uint64_t base = derive_seed(cfg.seed, 0x30000 + fi);
    auto rows = parallel_map<ReplicateRow>(
        static_cast<std::size_t>(cfg.replicates), resolve_workers(cfg.workers), [&](std::size_t r) {
          const std::uint64_t seed = derive_seed(base, r);
          const SignalMatrix x = sample(ModelSpec::single(truth, cfg.sigma, cfg.n, seed));
          const Vector var = wavelet_variances(x, wavelet);
          const double s2 = estimate_sigma2(var);
          const double r2 = estimate_rho_norm2(var);
          return ReplicateRow{static_cast<int>(r), seed, "estimators", fixture,
                              {{"sigma_hat", std::sqrt(s2)}, {"rho_norm_hat", std::sqrt(std::max(r2, 0.0))}}};
        });
    for (auto& row : rows) report.rows.push_back(std::move(row));
    report.figures.push_back({"sigma_hat_" + fixture, "hist", "sigma hat (" + fixture + ")", "sigma hat", "count",
                              false, {{fixture, {}, report.values("estimators", fixture, "sigma_hat")}}});
    report.figures.push_back({"rho_norm_hat_" + fixture, "hist", "|rho| hat (" + fixture + ")", "|rho| hat",
                              "count", false, {{fixture, {}, report.values("estimators", fixture, "rho_norm_hat")}}});
  }
  report.summarize_rows();
  return report;
}

inline Report run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::Ase: return run_ase(cfg);
    case Experiment::ConsistencySweep: return run_consistency_sweep(cfg);
    case Experiment::SelectionMc: return run_selection_mc(cfg);
    case Experiment::EstimatorHist: return run_estimator_hist(cfg);
    case Experiment::EcgPipeline: throw ConfigError("the ECG pipeline runs through the ecg command");
  }
  throw ConfigError("unknown experiment");
}

/// Writes report.json, replicates.csv and one SVG per figure; returns the paths written.
inline std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  const auto json_path = dir / "report.json";
  write_text(json_path, nlohmann::json(report).dump(2) + "\n");
  files.push_back(json_path);
  const auto csv_path = dir / "replicates.csv";
  write_text(csv_path, replicates_csv(report));
  files.push_back(csv_path);
  for (const auto& f : report.figures) {
    const auto path = dir / (f.name + ".svg");
    write_text(path, render_svg(f));
    files.push_back(path);
  }
  return files;
}

}  // namespace spca::bench
