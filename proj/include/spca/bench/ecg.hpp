#pragma once

// ECG cycle preprocessing: baseline removal between beat onsets, resampling
// of each cycle to a fixed length and alignment of the peak.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spca/bench/report.hpp"
#include "spca/error.hpp"
#include "spca/stats.hpp"
#include "spca/synth.hpp"

namespace spca::bench {

struct EcgConfig {
  std::vector<Eigen::Index> onsets;  // 0-based sample indices, strictly increasing
  Eigen::Index cycle_length = 512;
  Eigen::Index peak_index = 149;  // 0-based position of each cycle's maximum
};

/// Mean of the 5 samples nearest to index i, staying inside the trace.
inline double onset_level(const std::vector<double>& trace, Eigen::Index i) {
  const auto len = static_cast<Eigen::Index>(trace.size());
  const Eigen::Index width = std::min<Eigen::Index>(5, len);
  Eigen::Index lo = std::clamp<Eigen::Index>(i - 2, 0, len - width);
  double sum = 0;
  for (Eigen::Index k = lo; k < lo + width; ++k) sum += trace[static_cast<std::size_t>(k)];
  return sum / static_cast<double>(width);
}

/// Trace minus the piecewise-linear baseline through the onset levels.
/// Samples before the first onset or after the last keep the nearest level.
inline std::vector<double> remove_baseline(const std::vector<double>& trace, const std::vector<Eigen::Index>& onsets) {
  std::vector<double> levels;
  for (auto o : onsets) levels.push_back(onset_level(trace, o));
  std::vector<double> out(trace.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto t = static_cast<Eigen::Index>(i);
    while (seg + 1 < onsets.size() && t >= onsets[seg + 1]) ++seg;
    double base;
    if (t <= onsets.front()) {
      base = levels.front();
    } else if (seg + 1 >= onsets.size()) {
      base = levels.back();
    } else {
      const double frac = static_cast<double>(t - onsets[seg]) / static_cast<double>(onsets[seg + 1] - onsets[seg]);
      base = levels[seg] + frac * (levels[seg + 1] - levels[seg]);
    }
    out[i] = trace[i] - base;
  }
  return out;
}

/// Linear interpolation of samples y[0..len) onto `points` equally spaced positions.
inline Vector resample_linear(const double* y, Eigen::Index len, Eigen::Index points) {
  Vector out(points);
  const double step = static_cast<double>(len - 1) / static_cast<double>(points - 1);
  for (Eigen::Index k = 0; k < points; ++k) {
    const double s = static_cast<double>(k) * step;
    const auto i = std::min(static_cast<Eigen::Index>(std::floor(s)), len - 2);
    const double f = s - static_cast<double>(i);
    out(k) = (1 - f) * y[i] + f * y[i + 1];
  }
  return out;
}

/// Circular shift moving the first maximum to `target`.
inline Vector align_peak(const Vector& row, Eigen::Index target) {
  Eigen::Index arg = 0;
  row.maxCoeff(&arg);
  const Eigen::Index len = row.size();
  const Eigen::Index shift = ((target - arg) % len + len) % len;
  Vector out(len);
  for (Eigen::Index i = 0; i < len; ++i) out((i + shift) % len) = row(i);
  return out;
}

/// One row per cycle [onset_j, onset_{j+1}).
inline SignalMatrix ecg_preprocess(const std::vector<double>& trace, const EcgConfig& cfg) {
  const auto& on = cfg.onsets;
  if (on.size() < 2) throw InvalidInput("ecg_preprocess: need at least 2 onsets");
  for (std::size_t j = 0; j < on.size(); ++j) {
    if (on[j] < 0 || on[j] >= static_cast<Eigen::Index>(trace.size())) {
      throw InvalidInput("ecg_preprocess: onset " + std::to_string(on[j]) + " outside the trace");
    }
    if (j > 0 && on[j] <= on[j - 1]) throw InvalidInput("ecg_preprocess: onsets must be strictly increasing");
  }
  if (cfg.cycle_length < 2 || cfg.peak_index < 0 || cfg.peak_index >= cfg.cycle_length) {
    throw InvalidInput("ecg_preprocess: bad cycle length or peak index");
  }
  for (double v : trace) {
    if (!std::isfinite(v)) throw InvalidInput("ecg_preprocess: non-finite sample");
  }
  const std::vector<double> flat = remove_baseline(trace, on);
  Matrix rows(static_cast<Eigen::Index>(on.size() - 1), cfg.cycle_length);
  for (std::size_t j = 0; j + 1 < on.size(); ++j) {
    const Eigen::Index len = on[j + 1] - on[j];
    if (len < 8) {
      throw InvalidCycle("ecg_preprocess: cycle " + std::to_string(j) + " has " + std::to_string(len) +
                         " samples (minimum 8)");
    }
    const Vector cycle = resample_linear(flat.data() + on[j], len, cfg.cycle_length);
    rows.row(static_cast<Eigen::Index>(j)) = align_peak(cycle, cfg.peak_index).transpose();
  }
  return SignalMatrix(std::move(rows));
}

/// Upward crossings of 60% of the trace maximum, dropping any crossing within
/// 0.4 x the median crossing gap of the last kept one.
inline std::vector<Eigen::Index> detect_onsets(const std::vector<double>& trace) {
  if (trace.size() < 2) throw InvalidInput("detect_onsets: trace too short");
  const double level = 0.6 * *std::max_element(trace.begin(), trace.end());
  std::vector<Eigen::Index> raw;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i - 1] < level && trace[i] >= level) raw.push_back(static_cast<Eigen::Index>(i));
  }
  if (raw.size() < 2) return raw;
  std::vector<double> gaps;
  for (std::size_t i = 1; i < raw.size(); ++i) gaps.push_back(static_cast<double>(raw[i] - raw[i - 1]));
  const double refractory = 0.4 * median(gaps);
  std::vector<Eigen::Index> kept{raw.front()};
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (static_cast<double>(raw[i] - kept.back()) >= refractory) kept.push_back(raw[i]);
  }
  return kept;
}

/// First numeric field of each non-empty line.
inline std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    const std::string field = line.substr(start, line.find(',', start) - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
    } catch (const std::exception&) {
      if (out.empty() && lineno == 1) continue;  // header
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return out;
}

inline std::string matrix_csv(const Matrix& m) {
  std::ostringstream o;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) o << ',';
      o << format_double(m(i, j));
    }
    o << '\n';
  }
  return o.str();
}

}  // namespace spca::bench
