#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "laica/algorithms/lifelong.hpp"
#include "laica/errors.hpp"

namespace laica {

// Prefix-windowed running mean: entry t averages returns[max(0, t-w+1) .. t].
inline std::vector<double> running_mean(const std::vector<double>& x, int window) {
  if (window < 1) throw DomainError("running mean window must be >= 1");
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (size_t t = 0; t < x.size(); ++t) {
    sum += x[t];
    if (t >= static_cast<size_t>(window)) sum -= x[t - static_cast<size_t>(window)];
    size_t n = std::min(t + 1, static_cast<size_t>(window));
    out[t] = sum / static_cast<double>(n);
  }
  return out;
}

struct Curve {
  std::string algorithm;
  std::vector<std::int64_t> episode;
  std::vector<double> mean_return;
  std::vector<double> std_error;
  std::set<std::int64_t> change_markers;
  int n_trials = 0;
};

struct CurveBundle {
  std::vector<Curve> curves;
  std::vector<std::string> warnings;
};

// Mean and standard error (sample std / sqrt(n)) across trials of the
// running-mean-smoothed returns. Faulted trials are skipped.
inline Curve aggregate_curve(const std::string& algorithm, const std::vector<TrialRecord>& trials, int window) {
  Curve c;
  c.algorithm = algorithm;
  std::vector<std::vector<double>> smoothed;
  for (const auto& t : trials) {
    if (t.fault || t.algorithm != algorithm) continue;
    smoothed.push_back(running_mean(t.returns, window));
    if (smoothed.size() > 1 && smoothed.back().size() != smoothed.front().size())
      throw ShapeError("trials of " + algorithm + " have different lengths");
    for (auto e : t.change_episodes)
      if (e > 0) c.change_markers.insert(e);
  }
  c.n_trials = static_cast<int>(smoothed.size());
  if (smoothed.empty()) return c;
  const size_t len = smoothed.front().size();
  const double n = static_cast<double>(smoothed.size());
  for (size_t t = 0; t < len; ++t) {
    double mean = 0.0;
    for (const auto& s : smoothed) mean += s[t];
    mean /= n;
    double ss = 0.0;
    for (const auto& s : smoothed) ss += (s[t] - mean) * (s[t] - mean);
    double se = smoothed.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    c.episode.push_back(static_cast<std::int64_t>(t));
    c.mean_return.push_back(mean);
    c.std_error.push_back(se);
  }
  return c;
}

inline CurveBundle aggregate(const std::vector<std::string>& algorithms, const std::vector<TrialRecord>& trials,
                             int window) {
  CurveBundle b;
  for (const auto& a : algorithms) {
    b.curves.push_back(aggregate_curve(a, trials, window));
    const auto& c = b.curves.back();
    if (c.n_trials == 1) b.warnings.push_back(a + ": single trial, std_error reported as 0");
    if (c.n_trials == 0) b.warnings.push_back(a + ": no successful trials");
  }
  return b;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_curves_csv(const CurveBundle& b, std::ostream& os) {
  os << "algorithm,episode,mean_return,std_error,is_change_marker\n";
  for (const auto& c : b.curves)
    for (size_t i = 0; i < c.episode.size(); ++i)
      os << c.algorithm << ',' << c.episode[i] << ',' << format_double(c.mean_return[i]) << ','
         << format_double(c.std_error[i]) << ',' << (c.change_markers.count(c.episode[i]) ? 1 : 0) << '\n';
}

}  // namespace laica
