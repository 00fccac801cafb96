#pragma once

// Ensemble statistics over SMMC trajectories, analytic references, settling
// and correlation estimators, and parameter sweeps.

#include <cstdint>
#include <string>
#include <vector>

#include "qubot/mcwf.hpp"

namespace qubot {

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> F;        // mean overlap with phi+
  std::vector<double> F_se;     // standard error (n-1 sample std / sqrt n)
  std::vector<double> pos_mean; // frame-relative um
  std::vector<double> pos_std;  // total spread: sqrt(E[var + <x>^2] - pos_mean^2)
  std::vector<double> occupation;
  std::vector<double> occupation_se;
  std::vector<double> gamma_L1;  // 1/s
  std::vector<double> gamma_L2;
  int n_trajectories = 0;
};

// Throws std::invalid_argument on an empty list or mismatched time grids.
EnsembleStats ensemble_average(const std::vector<TrajectoryRecord>& records);

struct SteadyState {
  double F;
  double F_std;  // standard deviation over the window of the mean curve
  double gamma_L1, gamma_L1_std;
  double gamma_L2, gamma_L2_std;
  int n_points;
};

// Time average for t >= t_start. Throws std::invalid_argument if the window
// is empty.
SteadyState steady_state_average(const EnsembleStats& stats, double t_start);

// Fidelity of a Bell state under depolarization of one qubit at rate gamma:
// 1/4 + 3/4 exp(-4 gamma t / 3).
std::vector<double> depolarizing_reference(double gamma, const std::vector<double>& times);

struct SettlingOptions {
  double slope_threshold_per_ms = 0.01;
  double persistence_s = 1e-3;  // one trap period
  // Least-squares window for the slope. Over 1 ms the slope noise of a 10^3
  // trajectory mean (~0.015/ms) exceeds the threshold itself.
  double regression_window_s = 3e-3;
};

struct Settling {
  double t_s;
  double predicted_F;  // exp(-gamma t_s)
};

// First time t_i such that the forward regression slope of F, taken over
// [t_j, t_j + regression_window], stays below the threshold for every t_j in
// [t_i, t_i + persistence]. Throws std::runtime_error if F never settles.
Settling settling_consistency(const EnsembleStats& stats, double gamma, SettlingOptions opts = {});

// Pearson coefficient of the mean correction rates for t >= t_start.
// Throws std::invalid_argument for fewer than 10 points or zero variance.
double rate_anticorrelation(const EnsembleStats& stats, double t_start = 0.0);
double pearson(const std::vector<double>& x, const std::vector<double>& y);

enum class SweepKind { corrector_position, temperature_nbar };
const char* to_string(SweepKind k);

struct SweepPoint {
  double value;
  SteadyState steady;
};

struct SweepResult {
  SweepKind kind;
  std::vector<SweepPoint> points;
};

struct RunOptions {
  int trajectories = 100;
  std::uint64_t seed = 1;
  int workers = 0;
  double steady_state_start = 10e-3;
};

// Applies a sweep value to a copy of `base`. Position sweeps set
// R_L1 = +x, R_L2 = -x.
SimParams apply_sweep_value(const SimParams& base, SweepKind kind, double value);

// Every point uses the same seed (common random numbers). Throws
// std::invalid_argument on an empty value list.
SweepResult sweep(SweepKind kind, const std::vector<double>& values, const SimParams& base,
                  const RunOptions& opts);

struct CalibrationResult {
  std::vector<double> widths;
  std::vector<SteadyState> steady;
  double target;
  double best_width;
};

// Grids the corrector width and picks the value whose steady-state overlap is
// closest to `target`.
CalibrationResult calibrate_corrector_width(const SimParams& base, const std::vector<double>& widths,
                                            double target, const RunOptions& opts);

}  // namespace qubot
