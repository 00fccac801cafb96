#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qubot::checks {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr double kTargetSpacing = 0.3, kSpacingTol = 0.1;  // um
constexpr double kTargetTrapHz = 1e3;
constexpr double kJparTol = 0.10;
constexpr double kFieldLo = 0.2, kFieldHi = 20.0;  // "2 G order": within a decade of 2 G

constexpr double kBandLo = 0.65, kBandHi = 0.75;
constexpr double kAdvantageFrom = 6e-3;
constexpr double kSettleLo = 2e-3, kSettleHi = 6e-3, kSettleTol = 0.08;
constexpr double kPearsonMax = -0.3;

constexpr double kOptimum = 0.63;
constexpr double kNearBelow = 0.40, kNearMaxF = 0.5;

}  // namespace

bool all_pass(const std::vector<Check>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.pass; });
}

double jpar_target(const std::string& preset) {
  if (preset == "paper_main") return kTwoPi * 1401e3;
  if (preset == "paper_appendix_c") return kTwoPi * 1803e3;
  return 0.0;
}

std::vector<Check> landscape_checks(const std::string& preset, const Landscape& land,
                                    const ParallelFieldReport& field) {
  std::vector<Check> out;
  if (preset != "paper_appendix_c") {
    out.push_back({"minima spacing", std::abs(land.mean_spacing - kTargetSpacing) <= kSpacingTol,
                   fmt("%.4f um (target %.1f +- %.1f)", land.mean_spacing, kTargetSpacing, kSpacingTol)});
    double lo = INFINITY, hi = 0.0;
    int n = 0;
    for (const auto& ms : land.minima)
      for (const auto& m : ms) {
        lo = std::min(lo, m.trap_frequency / kTwoPi);
        hi = std::max(hi, m.trap_frequency / kTwoPi);
        ++n;
      }
    out.push_back({"trap frequencies", n > 0 && lo >= kTargetTrapHz / 2 && hi <= kTargetTrapHz * 2,
                   fmt("%d minima, %.0f..%.0f Hz (target 1 kHz within x2)", n, lo, hi)});
    const bool c = land.coincide(Bell::psi_minus, Bell::psi_plus);
    out.push_back({"psi-/psi+ coincidence", c, c ? "flag set" : "flag not set"});
  } else {
    const auto s = land.suggested();
    const bool ok = s && s->state == Bell::phi_minus;
    out.push_back({"protected state", ok,
                   s ? "suggested " + std::string(to_string(s->state)) : std::string("no suggestion")});
  }
  const double target = jpar_target(preset);
  if (target > 0.0) {
    const double rel = std::abs(std::abs(field.mean_jpar) - target) / target;
    out.push_back({"<J_par>", rel <= kJparTol,
                   fmt("|<J_par>| = %.6g rad/s vs %.6g rad/s (rel. dev. %.3f, tol %.2f)",
                       std::abs(field.mean_jpar), target, rel, kJparTol)});
  }
  const double b = std::abs(field.field_gauss);
  out.push_back({"compensating field", b >= kFieldLo && b <= kFieldHi,
                 fmt("|B| = %.3f G (order of 2 G: [%.1f, %.0f])", b, kFieldLo, kFieldHi)});
  return out;
}

SimulationSummary summarize(const EnsembleStats& stats, double gamma, double steady_start) {
  SimulationSummary s;
  s.steady = steady_state_average(stats, steady_start);
  try {
    s.settling = settling_consistency(stats, gamma);
    s.settled = true;
  } catch (const std::runtime_error& e) {
    s.settling_error = e.what();
  }
  try {
    s.pearson = rate_anticorrelation(stats);
    s.has_pearson = true;
  } catch (const std::invalid_argument& e) {
    s.pearson_error = e.what();
  }
  return s;
}

std::vector<Check> simulation_checks(const EnsembleStats& stats, const SimulationSummary& s,
                                     double gamma) {
  std::vector<Check> out;
  const double F = s.steady.F;
  out.push_back({"steady-state overlap", F >= kBandLo && F <= kBandHi,
                 fmt("<F>_s = %.4f (band [%.2f, %.2f])", F, kBandLo, kBandHi)});

  const auto ref = depolarizing_reference(gamma, stats.times);
  double worst = INFINITY, worst_t = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    if (stats.times[i] < kAdvantageFrom - 1e-12) continue;
    ++n;
    if (stats.F[i] - ref[i] < worst) {
      worst = stats.F[i] - ref[i];
      worst_t = stats.times[i];
    }
  }
  out.push_back({"above free decoherence", n > 0 && worst > 0.0,
                 fmt("min F - F_free = %.4f at t = %.2f ms over %d points", worst, worst_t * 1e3, n)});

  if (s.settled) {
    const double t = s.settling.t_s, d = std::abs(F - s.settling.predicted_F);
    out.push_back({"settling", t >= kSettleLo && t <= kSettleHi && d < kSettleTol,
                   fmt("t_s = %.2f ms, exp(-G t_s) = %.4f, |<F>_s - exp(-G t_s)| = %.4f (tol %.2f)",
                       t * 1e3, s.settling.predicted_F, d, kSettleTol)});
  } else {
    out.push_back({"settling", false, s.settling_error});
  }

  if (s.has_pearson)
    out.push_back({"rate anti-correlation", s.pearson < kPearsonMax,
                   fmt("pearson(gL1, gL2) = %.3f (need < %.1f)", s.pearson, kPearsonMax)});
  else
    out.push_back({"rate anti-correlation", false, s.pearson_error});
  return out;
}

std::vector<Check> position_sweep_checks(const SweepResult& r) {
  std::vector<Check> out;
  const auto& pts = r.points;
  // Grid of the sweep restricted to |R_L1| >= 0.40; the optimum tolerance is one step of it.
  std::vector<std::size_t> grid;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].value >= kNearBelow) grid.push_back(i);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].steady.F > pts[best].steady.F) best = i;
  const auto opt = std::find_if(grid.begin(), grid.end(),
                                [&](std::size_t i) { return std::abs(pts[i].value - kOptimum) < 1e-9; });
  const auto at = std::find(grid.begin(), grid.end(), best);
  const bool ok = opt != grid.end() && at != grid.end() && std::abs(at - opt) <= 1;
  out.push_back({"optimum position", ok,
                 fmt("argmax at %.2f um (<F>_s = %.4f), expected %.2f +- one grid step",
                     pts.empty() ? NAN : pts[best].value, pts.empty() ? NAN : pts[best].steady.F,
                     kOptimum)});

  int near = 0;
  bool near_ok = true;
  std::string det;
  for (const auto& p : pts) {
    if (p.value >= kNearBelow) continue;
    ++near;
    near_ok = near_ok && p.steady.F < kNearMaxF;
    det += fmt("%s%.2f->%.3f", det.empty() ? "" : ", ", p.value, p.steady.F);
  }
  out.push_back({"close correctors", near > 0 && near_ok,
                 near ? "<F>_s at " + det + " (need < 0.5)" : std::string("no point below 0.40 um")});

  // Beyond the optimum each rate may rise only within the combined error bars.
  bool mono = at != grid.end();
  std::string worst = "none";
  for (std::size_t i = best; mono && i + 1 < pts.size(); ++i) {
    const auto &a = pts[i].steady, &b = pts[i + 1].steady;
    if (b.gamma_L1 > a.gamma_L1 + std::hypot(a.gamma_L1_std, b.gamma_L1_std) ||
        b.gamma_L2 > a.gamma_L2 + std::hypot(a.gamma_L2_std, b.gamma_L2_std)) {
      mono = false;
      worst = fmt("rise between %.2f and %.2f um", pts[i].value, pts[i + 1].value);
    }
  }
  out.push_back({"rates decrease beyond optimum", mono,
                 mono ? fmt("gL1 %.0f -> %.0f /s, gL2 %.0f -> %.0f /s", pts[best].steady.gamma_L1,
                            pts.back().steady.gamma_L1, pts[best].steady.gamma_L2,
                            pts.back().steady.gamma_L2)
                      : worst});
  return out;
}

std::vector<Check> temperature_sweep_checks(const SweepResult& r) {
  bool ok = r.points.size() >= 2;
  std::string det;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    det += fmt("%s%.2f->%.3f+-%.3f", det.empty() ? "" : ", ", p.value, p.steady.F, p.steady.F_std);
    if (i == 0) continue;
    const auto& q = r.points[i - 1];
    ok = ok && !(p.value > q.value && p.steady.F - q.steady.F > p.steady.F_std + q.steady.F_std);
    ok = ok && p.value > q.value;
  }
  return {{"non-increasing in nbar", ok, "nbar->F: " + det}};
}

std::vector<Check> logical_checks(const logical::Table1Report& table,
                                  const std::vector<logical::EquilibriumResult>& eq) {
  std::vector<Check> out;
  int bad_cells = 0, bad_rows = 0;
  for (const auto& c : table.cells) bad_cells += !c.pass;
  for (const auto& c : table.corrected) bad_rows += !c.pass;
  out.push_back({"error-action cells", bad_cells == 0 && table.cells.size() == 12,
                 fmt("%zu cells, %d mismatched", table.cells.size(), bad_cells)});
  out.push_back({"corrected states", bad_rows == 0 && table.corrected.size() == 6,
                 fmt("%zu rows, %d mismatched", table.corrected.size(), bad_rows)});
  double worst = 0.0;
  bool psi_plus_min = true;
  for (const auto& e : eq) {
    for (const auto& r : e.roots) worst = std::max(worst, r.residual);
    if (e.bell == Bell::psi_plus) psi_plus_min = e.has_minimum();
  }
  out.push_back({"equilibria residuals", worst < 1e-9, fmt("max residual %.2e", worst)});
  out.push_back({"psi+ has no minimum", !psi_plus_min,
                 psi_plus_min ? "psi+ has a minimum" : "psi+ has no minimum"});
  return out;
}

}  // namespace qubot::checks
