#include "qubot/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qubot {

namespace {

// Welford; the naive sum of squares cancels badly when all samples agree.
struct Accum {
  double m = 0.0, m2 = 0.0;
  int k = 0;
  void add(double x) {
    ++k;
    const double d = x - m;
    m += d / k;
    m2 += d * (x - m);
  }
  double mean(int) const { return m; }
  // sample variance with n - 1; 0 for n = 1
  double var(int n) const { return n < 2 ? 0.0 : std::max(0.0, m2 / (n - 1)); }
};

double mean_of(const std::vector<double>& v, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(v.size() - from);
}

double std_of(const std::vector<double>& v, std::size_t from) {
  const std::size_t n = v.size() - from;
  if (n < 2) return 0.0;
  const double m = mean_of(v, from);
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += (v[i] - m) * (v[i] - m);
  return std::sqrt(s / static_cast<double>(n - 1));
}

}  // namespace

EnsembleStats ensemble_average(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw std::invalid_argument("ensemble_average: no records");
  const auto& t0 = records.front().times;
  for (const auto& r : records) {
    if (r.times != t0 || r.overlap.size() != t0.size() || r.pos_mean.size() != t0.size() ||
        r.gamma_L1.size() != t0.size() || r.gamma_L2.size() != t0.size())
      throw std::invalid_argument("ensemble_average: records do not share a time grid");
  }
  const int n = static_cast<int>(records.size());
  const std::size_t m = t0.size();
  EnsembleStats s;
  s.times = t0;
  s.n_trajectories = n;
  for (auto* v : {&s.F, &s.F_se, &s.pos_mean, &s.pos_std, &s.occupation, &s.occupation_se,
                  &s.gamma_L1, &s.gamma_L2})
    v->resize(m);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < m; ++i) {
    Accum f, x, occ;
    double x2 = 0.0, g1 = 0.0, g2 = 0.0;
    for (const auto& r : records) {
      f.add(r.overlap[i]);
      x.add(r.pos_mean[i]);
      x2 += r.pos_var[i] + r.pos_mean[i] * r.pos_mean[i];
      occ.add(r.occupation.empty() ? 0.0 : r.occupation[i]);
      g1 += r.gamma_L1[i];
      g2 += r.gamma_L2[i];
    }
    s.F[i] = std::clamp(f.mean(n), 0.0, 1.0);
    s.F_se[i] = std::sqrt(f.var(n)) / sqrt_n;
    s.pos_mean[i] = x.mean(n);
    s.pos_std[i] = std::sqrt(std::max(0.0, x2 / n - s.pos_mean[i] * s.pos_mean[i]));
    s.occupation[i] = occ.mean(n);
    s.occupation_se[i] = std::sqrt(occ.var(n)) / sqrt_n;
    s.gamma_L1[i] = g1 / n;
    s.gamma_L2[i] = g2 / n;
  }
  return s;
}

SteadyState steady_state_average(const EnsembleStats& stats, double t_start) {
  const auto it = std::lower_bound(stats.times.begin(), stats.times.end(), t_start - 1e-12);
  if (it == stats.times.end()) throw std::invalid_argument("steady_state_average: empty window");
  const auto from = static_cast<std::size_t>(it - stats.times.begin());
  return {mean_of(stats.F, from),        std_of(stats.F, from),
          mean_of(stats.gamma_L1, from), std_of(stats.gamma_L1, from),
          mean_of(stats.gamma_L2, from), std_of(stats.gamma_L2, from),
          static_cast<int>(stats.times.size() - from)};
}

std::vector<double> depolarizing_reference(double gamma, const std::vector<double>& times) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("depolarizing_reference: gamma must be >= 0");
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(0.25 + 0.75 * std::exp(-4.0 * gamma * t / 3.0));
  return out;
}

Settling settling_consistency(const EnsembleStats& stats, double gamma, SettlingOptions opts) {
  const auto& t = stats.times;
  const std::size_t n = t.size();
  if (n < 3) throw std::invalid_argument("settling_consistency: too few points");
  // OLS slope over [t_i, t_i + window]
  std::vector<double> slope(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i;
    while (j + 1 < n && t[j + 1] <= t[i] + opts.regression_window_s + 1e-12) ++j;
    if (j - i < 2 || t[j] - t[i] < opts.regression_window_s - 1e-12) break;
    double st = 0, sf = 0, stt = 0, stf = 0;
    const double k = static_cast<double>(j - i + 1);
    for (std::size_t q = i; q <= j; ++q) {
      st += t[q];
      sf += stats.F[q];
      stt += t[q] * t[q];
      stf += t[q] * stats.F[q];
    }
    slope[i] = (k * stf - st * sf) / (k * stt - st * st);
  }
  const double thr = opts.slope_threshold_per_ms * 1e3;  // per second
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(slope[i])) break;
    bool ok = true;
    std::size_t j = i;
    for (; j < n && t[j] <= t[i] + opts.persistence_s + 1e-12; ++j) {
      if (std::isnan(slope[j]) || std::abs(slope[j]) >= thr) {
        ok = false;
        break;
      }
    }
    if (ok) return {t[i], std::exp(-gamma * t[i])};
  }
  throw std::runtime_error("settling_consistency: no steady state detected");
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 10) throw std::invalid_argument("pearson: need at least 10 points");
  const double mx = mean_of(x, 0), my = mean_of(y, 0);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double rate_anticorrelation(const EnsembleStats& stats, double t_start) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    if (stats.times[i] < t_start - 1e-12) continue;
    a.push_back(stats.gamma_L1[i]);
    b.push_back(stats.gamma_L2[i]);
  }
  return pearson(a, b);
}

const char* to_string(SweepKind k) {
  return k == SweepKind::corrector_position ? "position" : "temperature";
}

SimParams apply_sweep_value(const SimParams& base, SweepKind kind, double value) {
  SimParams p = base;
  if (kind == SweepKind::corrector_position) {
    p.R_L1 = value;
    p.R_L2 = -value;
  } else {
    p.nbar = value;
  }
  return p;
}

SweepResult sweep(SweepKind kind, const std::vector<double>& values, const SimParams& base,
                  const RunOptions& opts) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  SweepResult out{kind, {}};
  for (double v : values) {
    const auto recs = run_ensemble(apply_sweep_value(base, kind, v), opts.trajectories, opts.seed,
                                   opts.workers);
    out.points.push_back({v, steady_state_average(ensemble_average(recs), opts.steady_state_start)});
  }
  return out;
}

CalibrationResult calibrate_corrector_width(const SimParams& base, const std::vector<double>& widths,
                                            double target, const RunOptions& opts) {
  if (widths.empty()) throw std::invalid_argument("calibrate_corrector_width: no widths");
  CalibrationResult out{widths, {}, target, widths.front()};
  double best = std::numeric_limits<double>::infinity();
  for (double w : widths) {
    SimParams p = base;
    p.corrector_width = w;
    const auto ss = steady_state_average(
        ensemble_average(run_ensemble(p, opts.trajectories, opts.seed, opts.workers)),
        opts.steady_state_start);
    out.steady.push_back(ss);
    if (std::abs(ss.F - target) < best) {
      best = std::abs(ss.F - target);
      out.best_width = w;
    }
  }
  return out;
}

}  // namespace qubot
