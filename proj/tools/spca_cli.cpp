// spca: run benchmark experiments, preprocess ECG traces, evaluate bounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "spca/bench/config.hpp"
#include "spca/bench/ecg.hpp"
#include "spca/bench/experiments.hpp"
#include "spca/theory.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

using nlohmann::json;
namespace fs = std::filesystem;
namespace sb = spca::bench;

/// Parses `arg` as inline JSON, or reads it as a file when it names one.
json load_json(const std::string& arg) {
  if (fs::is_regular_file(arg)) {
    std::ifstream in(arg);
    if (!in) throw sb::ConfigError("cannot read " + arg);
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw sb::ConfigError(arg + ": " + e.what());
    }
  }
  try {
    return json::parse(arg);
  } catch (const json::parse_error& e) {
    throw sb::ConfigError("'" + arg + "' is neither a file nor valid JSON");
  }
}

int cmd_run(const std::string& experiment, const std::string& config_path, const std::string& preset,
            std::optional<std::uint64_t> seed, const std::string& out, int workers) {
  json j = config_path.empty() ? json::object() : load_json(config_path);
  sb::ExperimentConfig base;
  if (!preset.empty()) sb::apply_preset(base, preset);
  sb::ExperimentConfig cfg = sb::parse_config(j, sb::parse_experiment(experiment), base);
  if (seed) cfg.seed = *seed;
  if (workers > 0) cfg.workers = workers;
  cfg.workers = sb::resolve_workers(cfg.workers);
  sb::validate(cfg);

  const sb::Report report = sb::run_experiment(cfg);
  const auto files = sb::emit_report(report, out);
  for (const auto& s : report.summary) {
    std::cout << s.group << '\t' << s.method << '\t' << s.metric << "\tmean=" << s.stats.mean
              << "\tmedian=" << s.stats.median << "\tsd=" << s.stats.sd << "\tn=" << s.stats.count << '\n';
  }
  if (!report.tables.empty()) std::cout << report.tables.dump(2) << '\n';
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
  return 0;
}

int cmd_ecg(const std::string& input, const std::string& onsets_arg, const std::string& out, int components) {
  const std::vector<double> trace = sb::read_column(input);
  sb::EcgConfig cfg;
  if (onsets_arg == "auto") {
    cfg.onsets = sb::detect_onsets(trace);
  } else {
    for (double v : sb::read_column(onsets_arg)) cfg.onsets.push_back(static_cast<Eigen::Index>(v));
  }
  const spca::SignalMatrix cycles = sb::ecg_preprocess(trace, cfg).centered_copy();
  const Eigen::Index m = std::min<Eigen::Index>(components, cycles.n());

  sb::Report report;
  report.experiment = "ecg";
  report.config = {{"input", input}, {"onsets", onsets_arg}, {"cycle_length", cfg.cycle_length},
                   {"peak_index", cfg.peak_index}, {"components", m}};
  report.tables["onsets"] = cfg.onsets;
  report.tables["cycles"] = cycles.n();

  std::vector<double> grid(static_cast<std::size_t>(cfg.cycle_length));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i);
  sb::Figure cyc{"cycles", "line", "Aligned cycles (centered)", "sample", "amplitude", false, {}};
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(cycles.n(), 8); ++i) {
    const spca::Vector r = cycles.data.row(i).transpose();
    cyc.series.push_back({"cycle " + std::to_string(i + 1), grid, {r.data(), r.data() + r.size()}});
  }
  report.figures.push_back(std::move(cyc));

  const auto sparse = spca::sparse_pca(cycles, spca::WaveletSpec{}, spca::SelectionConfig::quantile_excess(),
                                       spca::ThresholdConfig{}, m);
  const auto standard = spca::standard_pca(cycles, m);
  report.tables["sparse"] = {{"k_hat", sparse.k_hat},
                             {"sigma2_hat", sparse.sigma2_hat},
                             {"rho_norm2_hat", sparse.rho_norm2_hat},
                             {"eigenvalues", std::vector<double>(sparse.reduced_eigen.values.data(),
                                                                 sparse.reduced_eigen.values.data() + m)}};
  report.tables["standard"] = {
      {"eigenvalues", std::vector<double>(standard.values.data(), standard.values.data() + m)}};
  for (Eigen::Index c = 0; c < m; ++c) {
    const spca::Vector a = sparse.components.col(c);
    spca::Vector b = standard.vectors.col(c);
    if (a.dot(b) < 0) b = -b;
    report.figures.push_back({"component_" + std::to_string(c + 1), "line",
                              "Principal component " + std::to_string(c + 1), "sample", "loading", false,
                              {{"sparse", grid, {a.data(), a.data() + a.size()}},
                               {"standard", grid, {b.data(), b.data() + b.size()}}}});
  }

  const auto files = sb::emit_report(report, out);
  sb::write_text(fs::path(out) / "cycles.csv", sb::matrix_csv(cycles.data));
  std::cout << "cycles: " << cycles.n() << ", sparse k_hat: " << sparse.k_hat << '\n';
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
  std::cout << "wrote " << (fs::path(out) / "cycles.csv").string() << '\n';
  return 0;
}

int cmd_bounds(const std::string& kind, const std::string& params) {
  const json p = load_json(params);
  json out{{"bound", kind}};
  try {
    if (kind == "zeta") {
      const auto r = spca::assess_zeta(p.at("tau").get<double>(), p.at("c").get<double>());
      out.update({{"raw", r.raw}, {"value", r.value}, {"informative", r.informative}});
    } else if (kind == "omega") {
      spca::BoundParams bp{p.at("c").get<double>(), p.value("sigma", 1.0),
                           p.at("rho_norms").get<std::vector<double>>()};
      const auto r = spca::assess_omega(bp);
      out.update({{"raw", r.raw}, {"value", r.value}, {"applicable", r.informative}});
    } else if (kind == "fefi") {
      spca::SelectionBoundParams sp{p.at("p").get<double>(), p.at("n").get<double>(), p.at("k").get<double>(), 0.0};
      if (p.contains("gamma")) {
        sp.gamma = p.at("gamma").get<double>();
      } else {
        const double r = p.at("sd_ratio").get<double>();
        sp.gamma = spca::SelectionBoundParams::gamma_for_alpha(r * r - 1.0, sp.n);
      }
      out.update({{"gamma", sp.gamma}, {"alpha_n", sp.alpha_n()}, {"b_gamma", sp.b_gamma()},
                  {"value", spca::fe_fi_bound(sp)}});
    } else {
      throw sb::ConfigError("unknown bound '" + kind + "' (expected zeta, omega or fefi)");
    }
  } catch (const json::exception& e) {
    throw sb::ConfigError(std::string("bound parameters: ") + e.what());
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const spca::NumericalFailure*>(&e) || dynamic_cast<const spca::DegenerateGap*>(&e) ||
      dynamic_cast<const spca::EmptySelection*>(&e) || dynamic_cast<const spca::ExperimentFailed*>(&e)) {
    return kNumericalFailure;
  }
  if (dynamic_cast<const spca::InvalidInput*>(&e) || dynamic_cast<const spca::DomainError*>(&e) ||
      dynamic_cast<const spca::InvalidLength*>(&e) || dynamic_cast<const spca::InvalidCycle*>(&e)) {
    return kConfigError;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse principal components analysis: experiments, ECG preprocessing and bounds"};
  app.require_subcommand(1);

  std::string experiment, config, preset, out = "out";
  std::optional<std::uint64_t> seed;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment (ase, consistency, selection, estimators)");
  run->add_option("experiment", experiment, "Experiment name")->required();
  run->add_option("--config", config, "JSON config file or inline JSON");
  run->add_option("--preset", preset, "Scale preset; values in --config take precedence")->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--workers", workers, "Worker threads (SPCA_WORKERS overrides)");

  std::string input, onsets = "auto", ecg_out = "out";
  int components = 2;
  auto* ecg = app.add_subcommand("ecg", "Preprocess an ECG trace into aligned cycles and run PCA on them");
  ecg->add_option("--input", input, "Trace CSV, one sample per line")->required();
  ecg->add_option("--onsets", onsets, "'auto' or a file with one 0-based onset index per line");
  ecg->add_option("--out", ecg_out, "Output directory");
  ecg->add_option("--components", components, "Number of components")->check(CLI::PositiveNumber);

  std::string kind, params;
  auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  bounds->add_option("kind", kind, "zeta, omega or fefi")->required();
  bounds->add_option("--params", params, "JSON parameters (inline or file)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(experiment, config, preset, seed, out, workers);
    if (*ecg) return cmd_ecg(input, onsets, ecg_out, components);
    if (*bounds) return cmd_bounds(kind, params);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
  return 0;
}
