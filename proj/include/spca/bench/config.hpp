#pragma once

// Experiment configuration, parsed from JSON.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spca/error.hpp"
#include "spca/spca.hpp"
#include "spca/synth.hpp"
#include "spca/wavelet.hpp"

namespace spca::bench {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class Experiment { Ase, ConsistencySweep, SelectionMc, EstimatorHist, EcgPipeline };

inline Experiment parse_experiment(const std::string& s) {
  if (s == "ase") return Experiment::Ase;
  if (s == "consistency" || s == "consistency-sweep") return Experiment::ConsistencySweep;
  if (s == "selection" || s == "selection-mc") return Experiment::SelectionMc;
  if (s == "estimators" || s == "estimator-hist") return Experiment::EstimatorHist;
  if (s == "ecg") return Experiment::EcgPipeline;
  throw ConfigError("unknown experiment '" + s + "'");
}

inline std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Ase: return "ase";
    case Experiment::ConsistencySweep: return "consistency";
    case Experiment::SelectionMc: return "selection";
    case Experiment::EstimatorHist: return "estimators";
    case Experiment::EcgPipeline: return "ecg";
  }
  return "?";
}

struct GridPoint {
  Eigen::Index p = 0;
  Eigen::Index n = 0;
  std::vector<std::string> methods;  // empty: the experiment's method list
};

/// Population variances for the selection Monte Carlo. Either explicit, or
/// k-1 coordinates at (1+alpha), one at 1 and the rest at (1-alpha), with
/// sqrt(1+alpha) = sd_ratio.
struct SpikeProfile {
  Eigen::Index p = 1000;
  Eigen::Index n = 1000;
  Eigen::Index k = 50;
  double sd_ratio = 1.25;
  std::vector<double> variances;

  double alpha() const { return sd_ratio * sd_ratio - 1.0; }

  std::vector<double> population() const {
    if (!variances.empty()) return variances;
    const double a = alpha();
    std::vector<double> v(static_cast<std::size_t>(p), 1.0 - a);
    for (Eigen::Index i = 0; i + 1 < k; ++i) v[static_cast<std::size_t>(i)] = 1.0 + a;
    v[static_cast<std::size_t>(k - 1)] = 1.0;
    return v;
  }
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Ase;
  std::string fixture = "three-peak";
  std::vector<std::string> fixtures{"three-peak", "step"};
  std::optional<ModelSpec> model;  // fixture "custom"
  Eigen::Index p = 2048;
  Eigen::Index n = 1024;
  double sigma = 1.0;
  std::optional<double> norm;
  int replicates = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"sparse", "standard"};
  std::vector<double> lambdas{1e-6};
  bool smoothing_grid_scaled = true;
  WaveletSpec wavelet{};
  SelectionConfig selection = SelectionConfig::quantile_excess();
  ThresholdConfig threshold{};
  double gamma_a = std::sqrt(12.0);
  std::vector<GridPoint> grid;
  std::vector<SpikeProfile> profiles;
  int workers = 1;
};

inline double default_norm(const std::string& fixture) {
  if (fixture == "three-peak") return 10.0;
  if (fixture == "step") return kStepNorm;
  throw ConfigError("unknown fixture '" + fixture + "'");
}

/// Fixture target of length p.
inline Vector make_target(const std::string& fixture, Eigen::Index p, std::optional<double> norm = std::nullopt) {
  const double nv = norm.value_or(default_norm(fixture));
  if (fixture == "three-peak") return three_peak_target(p, nv);
  if (fixture == "step") return step_target(p, default_step_breakpoints(), nv);
  throw ConfigError("unknown fixture '" + fixture + "'");
}

/// The wavelet spec with levels reduced to what p supports.
inline WaveletSpec effective_wavelet(WaveletSpec w, Eigen::Index p) {
  if (w.family == WaveletFamily::Identity) return w;
  w.levels = std::min(w.levels, dyadic_depth(p));
  if (w.levels < 1) w.family = WaveletFamily::Identity;
  return w;
}

inline void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
  if (preset == "desk") {
    cfg.p = 512;
    cfg.n = 256;
    cfg.replicates = 10;
  } else if (preset == "paper") {
    cfg.p = 2048;
    cfg.n = 1024;
    cfg.replicates = 50;
  } else {
    throw ConfigError("unknown preset '" + preset + "' (expected desk or paper)");
  }
}

inline void validate(const ExperimentConfig& c) {
  if (c.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (c.p < 1 || c.n < 1) throw ConfigError("p and n must be positive");
  if (!(c.sigma >= 0)) throw ConfigError("sigma must be nonnegative");
  if (c.fixture != "custom") default_norm(c.fixture);
  if (c.fixture == "custom" && !c.model) throw ConfigError("fixture 'custom' needs a model");
  for (const auto& f : c.fixtures) default_norm(f);
  for (const auto& m : c.methods) {
    if (m != "sparse" && m != "sparse_a" && m != "standard" && m != "smoothed") {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
  for (double l : c.lambdas) {
    if (!(l >= 0)) throw ConfigError("lambdas must be nonnegative");
  }
  for (const auto& pr : c.profiles) {
    if (pr.variances.empty() && (pr.k < 1 || pr.k > pr.p)) throw ConfigError("profile needs 1 <= k <= p");
    if (!pr.variances.empty() && (pr.k < 1 || pr.k > static_cast<Eigen::Index>(pr.variances.size()))) {
      throw ConfigError("profile k outside the variance list");
    }
    if (pr.n < 2) throw ConfigError("profile n must be at least 2");
  }
}

inline nlohmann::json wavelet_json(const WaveletSpec& w) {
  return {{"family", std::string(to_string(w.family))}, {"levels", w.levels}};
}

inline nlohmann::json selection_json(const SelectionConfig& s) {
  switch (s.rule) {
    case SelectionConfig::Rule::FixedK: return {{"rule", "fixed"}, {"k", s.k}};
    case SelectionConfig::Rule::NoiseExceed: return {{"rule", "a"}, {"gamma", s.gamma}};
    case SelectionConfig::Rule::QuantileExcess: return {{"rule", "b"}, {"w", s.w}};
  }
  return {};
}

inline nlohmann::json threshold_json(const ThresholdConfig& t) {
  const char* mode = t.mode == ThresholdMode::Hard ? "hard" : t.mode == ThresholdMode::Soft ? "soft" : "none";
  nlohmann::json delta;
  switch (t.delta_rule) {
    case DeltaRule::Manual: delta = t.delta; break;
    case DeltaRule::TauSqrt2LogK: delta = "tau"; break;
    case DeltaRule::MadBased: delta = "mad"; break;
  }
  return {{"mode", mode}, {"delta", delta}};
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"experiment", experiment_name(c.experiment)},
                   {"fixture", c.fixture},
                   {"fixtures", c.fixtures},
                   {"p", c.p},
                   {"n", c.n},
                   {"sigma", c.sigma},
                   {"replicates", c.replicates},
                   {"seed", c.seed},
                   {"methods", c.methods},
                   {"lambdas", c.lambdas},
                   {"smoothing_grid_scaled", c.smoothing_grid_scaled},
                   {"wavelet", wavelet_json(c.wavelet)},
                   {"selection", selection_json(c.selection)},
                   {"threshold", threshold_json(c.threshold)},
                   {"gamma_a", c.gamma_a}};
  if (c.norm) j["norm"] = *c.norm;
  if (c.model) j["model"] = *c.model;
  auto grid = nlohmann::json::array();
  for (const auto& g : c.grid) grid.push_back({{"p", g.p}, {"n", g.n}, {"methods", g.methods}});
  j["grid"] = grid;
  auto profiles = nlohmann::json::array();
  for (const auto& pr : c.profiles) {
    nlohmann::json o{{"p", pr.p}, {"n", pr.n}, {"k", pr.k}, {"sd_ratio", pr.sd_ratio}};
    if (!pr.variances.empty()) o["variances"] = pr.variances;
    profiles.push_back(o);
  }
  j["profiles"] = profiles;
  return j;
}

namespace config_detail {

inline WaveletSpec parse_wavelet(const nlohmann::json& j) {
  WaveletSpec w;
  if (j.contains("family")) w.family = parse_wavelet_family(j.at("family").get<std::string>());
  w.levels = j.value("levels", w.levels);
  if (w.levels < 1) throw ConfigError("wavelet levels must be positive");
  return w;
}

inline SelectionConfig parse_selection(const nlohmann::json& j) {
  const auto rule = j.value("rule", std::string("b"));
  SelectionConfig s;
  if (rule == "b") {
    s = SelectionConfig::quantile_excess(j.value("w", 0.995));
    if (!(s.w > 0 && s.w <= 1)) throw ConfigError("selection.w must lie in (0, 1]");
  } else if (rule == "a") {
    s = SelectionConfig::noise_exceed(j.value("gamma", std::sqrt(12.0)));
    if (!(s.gamma > 0)) throw ConfigError("selection.gamma must be positive");
  } else if (rule == "fixed") {
    s = SelectionConfig::fixed_k(j.at("k").get<Eigen::Index>());
    if (s.k < 1) throw ConfigError("selection.k must be positive");
  } else {
    throw ConfigError("selection.rule must be a, b or fixed");
  }
  if (j.contains("sigma2")) s.sigma2 = j.at("sigma2").get<double>();
  return s;
}

inline ThresholdConfig parse_threshold(const nlohmann::json& j) {
  ThresholdConfig t;
  const auto mode = j.value("mode", std::string("hard"));
  if (mode == "hard") {
    t.mode = ThresholdMode::Hard;
  } else if (mode == "soft") {
    t.mode = ThresholdMode::Soft;
  } else if (mode == "none") {
    t.mode = ThresholdMode::None;
  } else {
    throw ConfigError("threshold.mode must be hard, soft or none");
  }
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    if (d.is_number()) {
      t.delta_rule = DeltaRule::Manual;
      t.delta = d.get<double>();
      if (!(t.delta >= 0)) throw ConfigError("threshold.delta must be nonnegative");
    } else if (d == "tau") {
      t.delta_rule = DeltaRule::TauSqrt2LogK;
    } else if (d == "mad") {
      t.delta_rule = DeltaRule::MadBased;
    } else {
      throw ConfigError("threshold.delta must be a number, \"tau\" or \"mad\"");
    }
  }
  return t;
}

}  // namespace config_detail

/// Overlays the JSON object `j` on `base` (defaults, possibly with a preset applied).
inline ExperimentConfig parse_config(const nlohmann::json& j, std::optional<Experiment> experiment = std::nullopt,
                                     ExperimentConfig c = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (experiment) {
      c.experiment = *experiment;
    } else if (j.contains("experiment")) {
      c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    }
    c.fixture = j.value("fixture", c.fixture);
    if (j.contains("fixtures")) c.fixtures = j.at("fixtures").get<std::vector<std::string>>();
    if (j.contains("model")) {
      c.model = j.at("model").get<ModelSpec>();
      c.fixture = "custom";
    }
    c.p = j.value("p", c.p);
    c.n = j.value("n", c.n);
    c.sigma = j.value("sigma", c.sigma);
    if (j.contains("norm")) c.norm = j.at("norm").get<double>();
    c.replicates = j.value("replicates", c.replicates);
    c.seed = j.value("seed", c.seed);
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.smoothing_grid_scaled = j.value("smoothing_grid_scaled", c.smoothing_grid_scaled);
    if (j.contains("wavelet")) c.wavelet = config_detail::parse_wavelet(j.at("wavelet"));
    if (j.contains("selection")) c.selection = config_detail::parse_selection(j.at("selection"));
    if (j.contains("threshold")) c.threshold = config_detail::parse_threshold(j.at("threshold"));
    c.gamma_a = j.value("gamma_a", c.gamma_a);
    if (j.contains("grid")) {
      for (const auto& g : j.at("grid")) {
        GridPoint gp{g.at("p").get<Eigen::Index>(), g.at("n").get<Eigen::Index>(), {}};
        if (g.contains("methods")) gp.methods = g.at("methods").get<std::vector<std::string>>();
        if (gp.p < 1 || gp.n < 1) throw ConfigError("grid points need positive p and n");
        c.grid.push_back(std::move(gp));
      }
    }
    if (j.contains("profiles")) {
      for (const auto& g : j.at("profiles")) {
        SpikeProfile pr;
        pr.p = g.value("p", pr.p);
        pr.n = g.value("n", pr.n);
        pr.k = g.value("k", pr.k);
        pr.sd_ratio = g.value("sd_ratio", pr.sd_ratio);
        if (g.contains("variances")) {
          pr.variances = g.at("variances").get<std::vector<double>>();
          pr.p = static_cast<Eigen::Index>(pr.variances.size());
        }
        c.profiles.push_back(std::move(pr));
      }
    }
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

}  // namespace spca::bench
