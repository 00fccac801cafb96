// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
// Exit status is 0 when the suite ran to completion, whatever the verdicts,
// so that a failing criterion is reported rather than hidden behind a red
// build; `acceptance --strict` exits 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "checks.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "qubot/config.hpp"
#include "qubot/ensemble.hpp"
#include "qubot/logical_model.hpp"
#include "qubot/potentials.hpp"

using namespace qubot;

namespace {

constexpr std::uint64_t kSeed = 20240611;  // not the calibration seed (7)
constexpr int kTrajectories = 1000;
constexpr double kEigTol = 1e-10;
constexpr double kLindbladTol = 1e-8;
constexpr double kSigmas = 3.0;
// Numerical floor for deterministic ensemble values whose standard error is
// exactly zero (round-off of normalized states).
constexpr double kFloor = 1e-9;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int n_failed = 0;

void report(int n, bool pass, const std::string& text, double seconds) {
  if (!pass) ++n_failed;
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << text
            << fmt(" (%.2f s)", seconds) << std::endl;
}

std::string failed_details(const std::vector<checks::Check>& cs) {
  std::string s;
  for (const auto& c : cs) s += (s.empty() ? "" : "; ") + std::string(c.pass ? "ok " : "FAILED ") + c.name + ": " + c.detail;
  return s;
}

// ---------------------------------------------------------------------------

void criterion1() {
  Timer t;
  const auto r = logical::table1_verify();
  int bad = 0;
  for (const auto& c : r.cells) bad += !c.pass;
  for (const auto& c : r.corrected) bad += !c.pass;
  const double s = t.seconds();
  report(1, r.all_pass() && r.cells.size() == 12 && r.corrected.size() == 6 && s < 1.0,
         fmt("table: %zu error-action cells + %zu corrected states, %d mismatches (budget 1 s)",
             r.cells.size(), r.corrected.size(), bad),
         s);
}

void criterion2() {
  Timer t;
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double scale = std::pow(10.0, 6 * std::abs(u(gen)));
    const double jx = scale * u(gen), jy = scale * u(gen), jz = scale * u(gen);
    const Matrix4c H = interaction_operator(jx, jy, jz).matrix();
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(H, Eigen::EigenvaluesOnly);
    std::vector<double> dense(es.eigenvalues().data(), es.eigenvalues().data() + 4), closed;
    for (Bell b : kAllBell) closed.push_back(bell_eigenvalue(b, jx, jy, jz));
    std::sort(closed.begin(), closed.end());
    const double norm = std::max(std::abs(dense.front()), std::abs(dense.back()));
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(dense[i] - closed[i]) / norm);
    for (Bell b : kAllBell) {
      const Vector4c v = bell_state(b).amplitudes();
      worst = std::max(worst, (H * v - bell_eigenvalue(b, jx, jy, jz) * v).norm() / norm);
    }
  }
  const double s = t.seconds();
  report(2, worst < kEigTol && s < 5.0,
         fmt("10^4 random couplings: max relative deviation %.2e (tol %.0e, budget 5 s)", worst, kEigTol), s);
}

void criterion3(const SimParams& base) {
  Timer t;
  SimParams p = base;
  p.correctors_enabled = false;
  const auto stats = ensemble_average(run_ensemble(p, kTrajectories, kSeed, 0));
  const auto ref = depolarizing_reference(p.gamma, stats.times);
  double worst_z = 0.0, worst_t = 0.0;
  int outside = 0;
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    const double d = std::abs(stats.F[i] - ref[i]);
    if (d > kSigmas * stats.F_se[i] + kFloor) ++outside;
    if (stats.F_se[i] > 0 && d / stats.F_se[i] > worst_z) {
      worst_z = d / stats.F_se[i];
      worst_t = stats.times[i];
    }
  }
  // analytic reference against a dense 4x4 Lindblad integration on the record grid
  const Vector4c phip = bell_state(Bell::phi_plus).amplitudes();
  std::vector<Eigen::MatrixXcd> L;
  for (Axis ax : {Axis::x, Axis::y, Axis::z}) L.push_back(std::sqrt(p.gamma / 3) * pauli(ax, Particle::b).matrix());
  Eigen::MatrixXcd rho = phip * phip.adjoint();
  double lind = std::abs(ref[0] - 1.0);
  for (std::size_t i = 1; i < stats.times.size(); ++i) {
    rho = oracle::lindblad_rk4(Eigen::MatrixXcd::Zero(4, 4), L, rho, stats.times[i] - stats.times[i - 1], 20);
    lind = std::max(lind, std::abs(phip.dot(rho * phip).real() - ref[i]));
  }
  const double s = t.seconds();
  report(3, outside == 0 && lind < kLindbladTol && s < 120.0,
         fmt("correctors off, %d trajectories: %d of %zu times outside 3 SE (largest %.2f SE at %.1f ms); "
             "reference vs dense Lindblad %.1e (tol %.0e, budget 120 s)",
             kTrajectories, outside, stats.times.size(), worst_z, worst_t * 1e3, lind, kLindbladTol),
         s);
}

struct OscillatorRun {
  std::vector<double> times, mean, se;
};

OscillatorRun oscillator_ensemble(const MotionState& start, double kappa, double nbar, double dt, int steps,
                                  int stride, std::uint64_t seed) {
  SimParams p;
  p.fock_dim = start.dim();
  const Eigen::MatrixXcd U = no_jump_propagator(motion_hamiltonian(0.0, p), kappa, nbar, dt);
  const int n_rec = steps / stride + 1;
  std::vector<double> sum(n_rec, 0.0), sum2(n_rec, 0.0);
  for (int k = 0; k < kTrajectories; ++k) {
    StreamRng rng(seed, static_cast<std::uint64_t>(k));
    MotionState phi = start;
    for (int i = 0; i <= steps; ++i) {
      if (i % stride == 0) {
        const double n = phi.mean_occupation();
        sum[i / stride] += n;
        sum2[i / stride] += n * n;
      }
      if (i < steps) mmc_step(phi, U, kappa, nbar, dt, rng);
    }
  }
  OscillatorRun r;
  const double N = kTrajectories;
  for (int j = 0; j < n_rec; ++j) {
    const double m = sum[j] / N;
    r.times.push_back(j * stride * dt);
    r.mean.push_back(m);
    r.se.push_back(std::sqrt(std::max(0.0, (sum2[j] - N * m * m) / (N - 1)) / N));
  }
  return r;
}

void criterion4(const SimParams& base) {
  Timer t;
  const double kappa = base.kappa;
  const MotionFrame f{0.0, base.zpm};
  // coherent state |alpha|^2 = 2.25
  const double alpha = 1.5;
  const auto coh = oscillator_ensemble(displaced_ground_state(2 * base.zpm * alpha, f, 40), kappa, 0.0, 2e-6,
                                       500, 25, kSeed);
  int outside = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < coh.times.size(); ++i) {
    const double d = std::abs(coh.mean[i] - alpha * alpha * std::exp(-kappa * coh.times[i]));
    worst = std::max(worst, d);
    if (d > kSigmas * coh.se[i] + kFloor) ++outside;
  }
  // analysis only: the first-order unfolding skips the no-jump evolution on jump steps, a bias of
  // order kappa dt per jump; a quarter of the step should show a quarter of the deviation
  const auto fine = oscillator_ensemble(displaced_ground_state(2 * base.zpm * alpha, f, 40), kappa, 0.0, 5e-7,
                                        2000, 100, kSeed);
  double worst_fine = 0.0;
  for (std::size_t i = 0; i < fine.times.size(); ++i)
    worst_fine = std::max(worst_fine, std::abs(fine.mean[i] - alpha * alpha * std::exp(-kappa * fine.times[i])));
  // thermal bath from the ground state
  const double nbar = 0.5;
  const auto th = oscillator_ensemble(MotionState::ground(24, f), kappa, nbar, 1e-6, 2000, 100, kSeed + 1);
  const double last = th.mean.back(), last_se = th.se.back();
  const bool thermal_ok = std::abs(last - nbar) <= kSigmas * last_se;
  const double s = t.seconds();
  report(4, outside == 0 && thermal_ok && s < 120.0,
         fmt("coherent |alpha|^2 = %.2f: %d of %zu times outside 3 SE, max |<n> - |alpha|^2 e^{-kappa t}| = %.1e at dt 2 us "
             "(%.1e at dt 0.5 us, analysis only); thermal nbar = %.1f: <n>(%.1f/kappa) = %.4f +- %.4f (budget 120 s)",
             alpha * alpha, outside, coh.times.size(), worst, worst_fine, nbar, th.times.back() * kappa, last, last_se),
         s);
}

void main_run(const SimParams& p) {
  Timer t;
  const auto stats = ensemble_average(run_ensemble(p, kTrajectories, kSeed, 0));
  const double run_s = t.seconds();
  const auto sum = checks::summarize(stats, p.gamma, 10e-3);
  const auto cs = checks::simulation_checks(stats, sum, p.gamma);
  report(5, cs[0].pass && cs[1].pass && run_s < 600.0,
         fmt("%d trajectories, corrector width %.3f um: %s; %s (budget 600 s)", kTrajectories, p.corrector_width,
             cs[0].detail.c_str(), cs[1].detail.c_str()),
         run_s);
  report(6, cs[2].pass, cs[2].detail + " (t_s in [2, 6] ms)", 0.0);
  std::string late;
  try {
    late = fmt("; for t >= 5 ms: %.3f, t >= 10 ms: %.3f", rate_anticorrelation(stats, 5e-3),
               rate_anticorrelation(stats, 10e-3));
  } catch (const std::exception& e) {
    late = std::string("; ") + e.what();
  }
  report(9, cs[3].pass, cs[3].detail + " over the full record" + late, 0.0);
}

void criterion7(const RunConfig& c, const SimParams& p) {
  Timer t;
  RunOptions o = c.run_options();
  o.trajectories = 100;
  o.seed = kSeed;
  const auto r = sweep(SweepKind::corrector_position, c.sweep.positions_um, p, o);
  const auto cs = checks::position_sweep_checks(r);
  const double s = t.seconds();
  std::string pts;
  for (const auto& q : r.points) pts += fmt("%s%.2f:%.3f", pts.empty() ? "" : " ", q.value, q.steady.F);
  report(7, checks::all_pass(cs) && s < 900.0, "100 traj/point, <F>_s " + pts + "; " + failed_details(cs), s);
}

void criterion8(const RunConfig& c, const SimParams& p) {
  Timer t;
  RunOptions o = c.run_options();
  o.trajectories = 100;
  o.seed = kSeed;
  const auto r = sweep(SweepKind::temperature_nbar, c.sweep.nbar_values, p, o);
  const auto cs = checks::temperature_sweep_checks(r);
  report(8, checks::all_pass(cs), "100 traj/point, " + cs[0].detail, t.seconds());
}

void criterion10() {
  Timer t;
  std::vector<checks::Check> all;
  std::string text;
  for (const char* name : {"paper_main", "paper_appendix_c"}) {
    const RunConfig c = preset(name);
    const auto pattern = spin_pattern(c.grid_points(), c.dressing_params());
    const auto land = landscape(pattern, c.trap_spec());
    const auto field =
        parallel_field_report(pattern, c.parallel_average_range_um[0], c.parallel_average_range_um[1]);
    const auto cs = checks::landscape_checks(name, land, field);
    all.insert(all.end(), cs.begin(), cs.end());
    text += std::string(text.empty() ? "" : " | ") + name + ": " + failed_details(cs);
  }
  report(10, checks::all_pass(all), text, t.seconds());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void criterion11(const SimParams& p) {
  Timer t;
  const int n = 16;
  const auto a = run_ensemble(p, n, kSeed, 1);
  bool same = true;
  for (int w : {2, 5, 0}) {
    const auto b = run_ensemble(p, n, kSeed, w);
    for (int i = 0; i < n; ++i) {
      same = same && a[i].times == b[i].times && a[i].overlap == b[i].overlap && a[i].pos_mean == b[i].pos_mean &&
             a[i].pos_var == b[i].pos_var && a[i].occupation == b[i].occupation && a[i].gamma_L1 == b[i].gamma_L1 &&
             a[i].gamma_L2 == b[i].gamma_L2 && a[i].events.size() == b[i].events.size();
      for (std::size_t k = 0; same && k < a[i].events.size(); ++k)
        same = a[i].events[k].time == b[i].events[k].time && a[i].events[k].kind == b[i].events[k].kind &&
               a[i].events[k].spin_after == b[i].events[k].spin_after;
    }
  }
  // CSV files written by the tool
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("qubot_acceptance_" + std::to_string(::getpid()));
  std::ostringstream sink;
  bool csv_same = true;
  for (const char* w : {"1", "4"}) {
    const std::string out = (dir / w).string();
    const char* argv[] = {"qubot", "simulate", "--trajectories", "16", "--workers", w, "--dump-trajectories", "16",
                          "--out", out.c_str()};
    csv_same = csv_same && run_cli(10, argv, sink, sink) == 0;
  }
  for (const char* f : {"ensemble.csv", "trajectories.csv", "events.csv"})
    csv_same = csv_same && slurp(dir / "1" / f) == slurp(dir / "4" / f) && !slurp(dir / "1" / f).empty();
  fs::remove_all(dir);
  report(11, same && csv_same,
         fmt("%d trajectories with 1/2/5/all workers: records %s; CSVs (1 vs 4 workers) %s", n,
             same ? "identical" : "DIFFER", csv_same ? "byte-identical" : "DIFFER"),
         t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  try {
    const RunConfig c = preset("paper_main");
    const SimParams p = c.sim_params();
    std::cout << fmt("paper_main preset: gamma %.0f /s, omega_t 2pi x %.0f Hz, kappa %.1f /s, R_L1 %+.2f um, "
                     "R_L2 %+.2f um, corrector width %.3f um, seed %llu",
                     p.gamma, p.omega_t / kTwoPi, p.kappa, p.R_L1, p.R_L2, p.corrector_width,
                     static_cast<unsigned long long>(kSeed))
              << std::endl;
    criterion1();
    criterion2();
    criterion3(p);
    criterion4(p);
    main_run(p);
    criterion7(c, p);
    criterion8(c, p);
    criterion10();
    criterion11(p);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << "acceptance: " << 11 - n_failed << " of 11 criteria pass" << std::endl;
  return strict && n_failed > 0 ? 1 : 0;
}
