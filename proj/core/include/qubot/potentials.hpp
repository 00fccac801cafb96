#pragma once

// Dressed-Rydberg spin pattern, optical tweezer traps and the resulting
// spin-dependent potential landscapes.
//
// Energies are in rad/s (hbar = 1), lengths in micrometres.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qubot/quantum_core.hpp"

namespace qubot {

inline constexpr double kTwoPi = 6.283185307179586;
// hbar / m for 87Rb, um^2/s.
inline constexpr double kHbarOverMassRb87 = 1.054571817e-34 / (86.909180527 * 1.66053906660e-27) * 1e12;
// Zeeman shift used to convert J_par into a compensating field, Hz per gauss.
inline constexpr double kZeemanHzPerGauss = 0.70e6;

// A denominator of the steplike expressions is (nearly) zero.
class ResonanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class VaaBranch { opposite, same };

struct DressingParams {
  int n = 60;
  double omega_plus = 0.0;   // rad/s
  double omega_minus = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double c6a = 0.0;  // rad/s um^6
  double c6b = 0.0;
  double c6c = 0.0;
  // Which dressing branch feeds the leading light-shift terms of V~_aa.
  VaaBranch vaa_branch = VaaBranch::opposite;
  // Multiplies W~_{++}. -1 swaps J_x and J_y, i.e. exchanges the phi+/phi-
  // labels (a relative phase i on |1>).
  int pair_coupling_sign = -1;

  // Throws std::invalid_argument on hard violations (|Omega/Delta| > 0.5,
  // non-opposite detunings, Delta_+ + Delta_- > 0); returns warnings for
  // 0.2 < |Omega/Delta| <= 0.5.
  std::vector<std::string> validate() const;
};

// n = 60 channel coefficients, rad/s um^6.
std::array<double, 3> c6_n60();

DressingParams paper_main_dressing();
DressingParams paper_appendix_c_dressing();

struct VdwCoefficients {
  double c_pp;
  double c_pm;
  double w;
};

VdwCoefficients vdw_combination(double c6a, double c6b, double c6c);

struct VdwPotentials {
  double v_pp, v_pm, w_pm, w_pp;
};
VdwPotentials vdw_potentials(const VdwCoefficients& c, double R);

struct Steplike {
  double v_mm, v_pm, v_pp, w_pm, w_pp;
};

// Throws std::invalid_argument for R <= 0 and ResonanceError when a
// denominator vanishes to 1e-6 relative.
Steplike steplike(double R, const DressingParams& p);

struct SpinCoefficients {
  double jx, jy, jz, jpar;
};
SpinCoefficients spin_coefficients(double R, const DressingParams& p);

struct SpinPattern {
  DressingParams params;
  Eigen::VectorXd R;
  Eigen::VectorXd jx, jy, jz, jpar;
};

Eigen::VectorXd log_grid(double r_min, double r_max, int n);

// Throws std::invalid_argument unless the grid is strictly increasing and
// positive.
SpinPattern spin_pattern(const Eigen::VectorXd& R, const DressingParams& p);

// Largest |d ln|J| / d ln R| of the three XYZ couplings over the last decade
// of the grid; small values mean the pattern has reached its light-shift
// plateau.
double asymptotic_log_slope(const SpinPattern& pattern);

// ---------------------------------------------------------------------------

enum class TrapKind { single, dual };

struct TrapSpec {
  TrapKind kind = TrapKind::dual;
  double v0 = 15e3;  // rad/s per um^2
  double delta1 = 1.6;
  double delta2 = 2.0;

  void validate() const;
  double operator()(double R) const;
  double curvature() const;  // V_t''
};

TrapSpec paper_main_trap();
TrapSpec paper_appendix_c_trap();

// Energy of the landscape branch adiabatically connected to `b`. With
// J_par = 0 this is the Bell eigenvalue; otherwise phi+- mix through the
// Z_a + Z_b term and the branch energies are J_z +- sqrt((J_x-J_y)^2 + 4J_par^2).
double branch_energy(Bell b, const SpinCoefficients& j);

struct Minimum {
  double R;
  double V;
  double curvature;        // rad/s per um^2
  double trap_frequency;   // rad/s
};

struct ProtectedSuggestion {
  Bell state;
  bool l1_at_larger_R;  // Z_b partner pushes b outward
  double force_z, force_x, force_y;  // -dV/dR of the partner landscapes at R0, rad/s/um
};

struct LandscapeOptions {
  bool compensate_parallel = true;
  double refine_tol = 1e-4;
  double coincidence_fraction = 0.01;
  double hbar_over_mass = kHbarOverMassRb87;
};

struct Landscape {
  Eigen::VectorXd R;
  std::array<Eigen::VectorXd, 4> V;  // kAllBell order
  std::array<std::vector<Minimum>, 4> minima;
  double dynamic_range = 0.0;
  std::vector<std::pair<Bell, Bell>> coincident;
  std::vector<ProtectedSuggestion> protected_candidates;
  std::vector<double> distinct_minima;  // sorted, coincident minima merged
  double mean_spacing = 0.0;            // span / (k - 1)

  const Eigen::VectorXd& trace(Bell b) const { return V[static_cast<int>(b)]; }
  const std::vector<Minimum>& minima_of(Bell b) const { return minima[static_cast<int>(b)]; }
  bool coincide(Bell l, Bell r) const;
  std::optional<ProtectedSuggestion> suggested() const;
};

Landscape landscape(const SpinPattern& pattern, const TrapSpec& trap, LandscapeOptions opts = {});

// Single-point evaluation of a landscape trace.
double landscape_value(Bell b, double R, const DressingParams& p, const TrapSpec& trap,
                       bool compensate_parallel);

struct ParallelFieldReport {
  double mean_jpar;     // rad/s
  double field_gauss;   // mean_jpar / (2 pi * 0.70 MHz/G)
};

// Range average of J_par (trapezoidal over the grid samples in [r_min, r_max]).
ParallelFieldReport parallel_field_report(const SpinPattern& pattern, double r_min, double r_max);

struct DressedLifetime {
  double tau_s;  // s
  double gamma;  // 1/s
};

// tau_s = (2 Delta / Omega)^2 tau_r. Throws std::invalid_argument for Omega = 0.
DressedLifetime dressed_lifetime(double delta, double omega, double tau_r);

}  // namespace qubot
