#include "qubot/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qubot {

namespace {

constexpr double kResonanceRel = 1e-6;

void check_denominator(double value, double scale, const char* name, double R) {
  if (!std::isfinite(value) || std::abs(value) <= kResonanceRel * scale) {
    std::ostringstream msg;
    msg << "steplike: resonant denominator " << name << " at R = " << R << " um";
    throw ResonanceError(msg.str());
  }
}

double sq(double x) { return x * x; }

}  // namespace

std::vector<std::string> DressingParams::validate() const {
  std::vector<std::string> warnings;
  for (double v : {omega_plus, omega_minus, delta_plus, delta_minus, c6a, c6b, c6c})
    if (!std::isfinite(v)) throw std::invalid_argument("DressingParams: non-finite value");
  if (delta_plus == 0.0 || delta_minus == 0.0)
    throw std::invalid_argument("DressingParams: detunings must be non-zero");
  if (!(delta_plus / delta_minus < 0.0))
    throw std::invalid_argument("DressingParams: Delta_+ and Delta_- must have opposite signs");
  if (delta_plus + delta_minus > 0.0)
    throw std::invalid_argument("DressingParams: Delta_+ + Delta_- must not be positive");
  if (pair_coupling_sign != 1 && pair_coupling_sign != -1)
    throw std::invalid_argument("DressingParams: pair_coupling_sign must be +1 or -1");
  const std::pair<const char*, double> ratios[] = {{"+", std::abs(omega_plus / delta_plus)},
                                                   {"-", std::abs(omega_minus / delta_minus)}};
  for (const auto& [branch, r] : ratios) {
    std::ostringstream msg;
    msg << "|Omega_" << branch << "/Delta_" << branch << "| = " << r;
    if (r > 0.5) throw std::invalid_argument("DressingParams: " + msg.str() + " exceeds 0.5");
    if (r > 0.2) warnings.push_back(msg.str() + " is outside the perturbative regime (> 0.2)");
  }
  return warnings;
}

std::array<double, 3> c6_n60() {
  const double mhz = kTwoPi * 1e6;
  return {-2.7e5 * mhz, 1.1e3 * mhz, 4.9e4 * mhz};
}

DressingParams paper_main_dressing() {
  DressingParams p;
  const double mhz = kTwoPi * 1e6;
  p.delta_plus = -50 * mhz;
  p.delta_minus = 50 * mhz;
  p.omega_plus = 9 * mhz;
  p.omega_minus = 3 * mhz;
  const auto c6 = c6_n60();
  p.c6a = c6[0];
  p.c6b = c6[1];
  p.c6c = c6[2];
  return p;
}

DressingParams paper_appendix_c_dressing() {
  DressingParams p = paper_main_dressing();
  const double mhz = kTwoPi * 1e6;
  p.delta_plus = -70 * mhz;
  p.delta_minus = 30 * mhz;
  p.omega_plus = -7 * mhz;
  p.omega_minus = -7 * mhz;
  return p;
}

VdwCoefficients vdw_combination(double c6a, double c6b, double c6c) {
  const double k = 2.0 / 81.0;
  return {k * (5 * c6a + 14 * c6b + 8 * c6c), k * (c6a + 10 * c6b + 16 * c6c),
          k * (c6a + c6b - 2 * c6c)};
}

VdwPotentials vdw_potentials(const VdwCoefficients& c, double R) {
  const double r6 = std::pow(R, 6);
  const double w_pm = c.w / r6;
  return {c.c_pp / r6, c.c_pm / r6, w_pm, -3.0 * w_pm};
}

Steplike steplike(double R, const DressingParams& p) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("steplike: R must be positive");
  const VdwPotentials v = vdw_potentials(vdw_combination(p.c6a, p.c6b, p.c6c), R);
  const double Op = p.omega_plus, Om = p.omega_minus;
  const double Dp = p.delta_plus, Dm = p.delta_minus;
  const double Dpm = Dp + Dm;

  const double a1 = v.v_pp - 2 * Dp, a2 = v.v_pp - 2 * Dm;
  const double den_pp = sq(v.w_pp) - a1 * a2;
  check_denominator(den_pp, sq(v.w_pp) + std::abs(a1 * a2), "W_pp^2 - (V_pp - 2D+)(V_pp - 2D-)", R);
  const double b1 = Dpm - v.v_pm;
  const double den_pm = sq(b1) - sq(v.w_pm);
  check_denominator(den_pm, sq(b1) + sq(v.w_pm), "(D+- - V_pm)^2 - W_pm^2", R);

  auto vaa = [&](int alpha) {
    const int s = p.vaa_branch == VaaBranch::opposite ? -alpha : alpha;
    const double Os = s > 0 ? Op : Om, Ds = s > 0 ? Dp : Dm;
    const double Ob = alpha > 0 ? Om : Op, Db = alpha > 0 ? Dm : Dp;  // alpha-bar
    const double Da = alpha > 0 ? Dp : Dm;
    return sq(Os) / (2 * Ds) - std::pow(Os, 4) / (4 * std::pow(Ds, 3)) +
           std::pow(Ob, 4) / (4 * sq(Db)) * (v.v_pp - 2 * Da) / den_pp;
  };

  const double OO = sq(Op) * sq(Om);
  Steplike s{};
  s.v_mm = vaa(-1);
  s.v_pp = vaa(+1);
  s.v_pm = sq(Om) / (4 * Dm) + sq(Op) / (4 * Dp) - OO / (16 * sq(Dp) * Dm) -
           OO / (16 * sq(Dm) * Dp) - std::pow(Om, 4) / (16 * std::pow(Dm, 3)) -
           std::pow(Op, 4) / (16 * std::pow(Dp, 3)) +
           sq(Dpm) * OO / (16 * sq(Dp) * sq(Dm)) * b1 / den_pm;
  s.w_pm = OO / (16 * sq(Dp) * sq(Dm)) * sq(Dpm) * v.w_pm / den_pm;
  s.w_pp = p.pair_coupling_sign * OO / (4 * Dp * Dm) * v.w_pp / den_pp;
  return s;
}

SpinCoefficients spin_coefficients(double R, const DressingParams& p) {
  const Steplike s = steplike(R, p);
  return {2 * (s.w_pm + s.w_pp), 2 * (s.w_pm - s.w_pp), (s.v_mm - 2 * s.v_pm + s.v_pp) / 4,
          (s.v_mm - s.v_pp) / 4};
}

Eigen::VectorXd log_grid(double r_min, double r_max, int n) {
  if (!(r_min > 0.0) || !(r_max > r_min) || n < 2)
    throw std::invalid_argument("log_grid: need 0 < r_min < r_max and n >= 2");
  Eigen::VectorXd R(n);
  const double lr = std::log(r_min), step = (std::log(r_max) - lr) / (n - 1);
  for (int i = 0; i < n; ++i) R(i) = std::exp(lr + step * i);
  R(0) = r_min;
  R(n - 1) = r_max;
  return R;
}

SpinPattern spin_pattern(const Eigen::VectorXd& R, const DressingParams& p) {
  if (R.size() < 2) throw std::invalid_argument("spin_pattern: grid needs at least two points");
  for (Eigen::Index i = 0; i < R.size(); ++i) {
    if (!(R(i) > 0.0)) throw std::invalid_argument("spin_pattern: grid must be positive");
    if (i > 0 && !(R(i) > R(i - 1)))
      throw std::invalid_argument("spin_pattern: grid must be strictly increasing");
  }
  SpinPattern out{p, R, Eigen::VectorXd(R.size()), Eigen::VectorXd(R.size()),
                  Eigen::VectorXd(R.size()), Eigen::VectorXd(R.size())};
  for (Eigen::Index i = 0; i < R.size(); ++i) {
    const SpinCoefficients j = spin_coefficients(R(i), p);
    out.jx(i) = j.jx;
    out.jy(i) = j.jy;
    out.jz(i) = j.jz;
    out.jpar(i) = j.jpar;
    if (!std::isfinite(j.jx) || !std::isfinite(j.jy) || !std::isfinite(j.jz) || !std::isfinite(j.jpar))
      throw std::domain_error("spin_pattern: non-finite coupling");
  }
  return out;
}

double asymptotic_log_slope(const SpinPattern& pattern) {
  const Eigen::Index n = pattern.R.size();
  const double r_end = pattern.R(n - 1);
  Eigen::Index i0 = 0;
  while (i0 < n - 1 && pattern.R(i0) < r_end / 10.0) ++i0;
  if (i0 >= n - 1) i0 = 0;
  const double span = std::log(r_end / pattern.R(i0));
  double worst = 0.0;
  for (const Eigen::VectorXd* j : {&pattern.jx, &pattern.jy, &pattern.jz}) {
    const double a = (*j)(i0), b = (*j)(n - 1);
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(b - a) / scale / span);
  }
  return worst;
}

// ---------------------------------------------------------------------------

void TrapSpec::validate() const {
  if (!(v0 > 0.0)) throw std::invalid_argument("TrapSpec: V0 must be positive");
  if (!std::isfinite(delta1) || (kind == TrapKind::dual && !std::isfinite(delta2)))
    throw std::invalid_argument("TrapSpec: non-finite centre");
}

double TrapSpec::operator()(double R) const {
  if (kind == TrapKind::single) return v0 * sq(R - delta1);
  return v0 * (sq(R - delta1) + sq(R - delta2));
}

double TrapSpec::curvature() const { return kind == TrapKind::single ? 2 * v0 : 4 * v0; }

TrapSpec paper_main_trap() { return TrapSpec{TrapKind::dual, 15e3, 1.6, 2.0}; }
TrapSpec paper_appendix_c_trap() { return TrapSpec{TrapKind::single, 15e3, 2.30, 0.0}; }

double branch_energy(Bell b, const SpinCoefficients& j) {
  if (b == Bell::psi_minus || b == Bell::psi_plus || j.jpar == 0.0)
    return bell_eigenvalue(b, j.jx, j.jy, j.jz);
  // phi sector: [[Jz + 2Jpar, Jx - Jy], [Jx - Jy, Jz - 2Jpar]] on |00>, |11>
  const double r = std::hypot(j.jx - j.jy, 2 * j.jpar);
  const double s = (j.jx - j.jy) >= 0.0 ? 1.0 : -1.0;  // phi+ sits on this branch
  return j.jz + (b == Bell::phi_plus ? s : -s) * r;
}

double landscape_value(Bell b, double R, const DressingParams& p, const TrapSpec& trap,
                       bool compensate_parallel) {
  SpinCoefficients j = spin_coefficients(R, p);
  if (compensate_parallel) j.jpar = 0.0;
  return trap(R) + branch_energy(b, j);
}

bool Landscape::coincide(Bell l, Bell r) const {
  return std::any_of(coincident.begin(), coincident.end(), [&](const auto& c) {
    return (c.first == l && c.second == r) || (c.first == r && c.second == l);
  });
}

std::optional<ProtectedSuggestion> Landscape::suggested() const {
  if (protected_candidates.empty()) return std::nullopt;
  return *std::max_element(protected_candidates.begin(), protected_candidates.end(),
                           [](const auto& l, const auto& r) {
                             return std::min(std::abs(l.force_z), std::abs(l.force_x)) <
                                    std::min(std::abs(r.force_z), std::abs(r.force_x));
                           });
}

namespace {

Bell z_partner(Bell b) {
  switch (b) {
    case Bell::psi_minus: return Bell::psi_plus;
    case Bell::psi_plus: return Bell::psi_minus;
    case Bell::phi_minus: return Bell::phi_plus;
    case Bell::phi_plus: return Bell::phi_minus;
  }
  return b;
}

Bell x_partner(Bell b) {
  switch (b) {
    case Bell::psi_minus: return Bell::phi_minus;
    case Bell::phi_minus: return Bell::psi_minus;
    case Bell::psi_plus: return Bell::phi_plus;
    case Bell::phi_plus: return Bell::psi_plus;
  }
  return b;
}

Bell y_partner(Bell b) { return z_partner(x_partner(b)); }

template <class F>
double golden_min(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Landscape landscape(const SpinPattern& pattern, const TrapSpec& trap, LandscapeOptions opts) {
  trap.validate();
  const Eigen::Index n = pattern.R.size();
  Landscape out;
  out.R = pattern.R;
  for (Bell b : kAllBell) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const SpinCoefficients j{pattern.jx(i), pattern.jy(i), pattern.jz(i),
                               opts.compensate_parallel ? 0.0 : pattern.jpar(i)};
      v(i) = trap(pattern.R(i)) + branch_energy(b, j);
    }
    out.V[static_cast<int>(b)] = std::move(v);
  }

  double vmin = out.V[0].minCoeff(), vmax = out.V[0].maxCoeff();
  for (const auto& v : out.V) {
    vmin = std::min(vmin, v.minCoeff());
    vmax = std::max(vmax, v.maxCoeff());
  }
  out.dynamic_range = vmax - vmin;
  for (int l = 0; l < 4; ++l)
    for (int r = l + 1; r < 4; ++r)
      if ((out.V[l] - out.V[r]).cwiseAbs().maxCoeff() < opts.coincidence_fraction * out.dynamic_range)
        out.coincident.emplace_back(kAllBell[l], kAllBell[r]);

  const auto& prm = pattern.params;
  auto value = [&](Bell b, double R) {
    return landscape_value(b, R, prm, trap, opts.compensate_parallel);
  };
  const double h = 1e-3;
  for (Bell b : kAllBell) {
    const Eigen::VectorXd& v = out.trace(b);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      if (!(v(i) < v(i - 1) && v(i) <= v(i + 1))) continue;
      const double R0 = golden_min([&](double R) { return value(b, R); }, pattern.R(i - 1),
                                   pattern.R(i + 1), opts.refine_tol);
      const double curv = (value(b, R0 + h) - 2 * value(b, R0) + value(b, R0 - h)) / (h * h);
      const double omega = curv > 0.0 ? std::sqrt(opts.hbar_over_mass * curv) : 0.0;
      out.minima[static_cast<int>(b)].push_back({R0, value(b, R0), curv, omega});
    }
  }

  // Distinct minima: coincident landscapes share one equilibrium.
  std::vector<double> all;
  for (const auto& ms : out.minima)
    for (const auto& m : ms) all.push_back(m.R);
  std::sort(all.begin(), all.end());
  for (double r : all)
    if (out.distinct_minima.empty() || r - out.distinct_minima.back() > 1e-3)
      out.distinct_minima.push_back(r);
  if (out.distinct_minima.size() > 1)
    out.mean_spacing = (out.distinct_minima.back() - out.distinct_minima.front()) /
                       static_cast<double>(out.distinct_minima.size() - 1);

  // Protected state: after a Z_b or X_b error the partner landscapes must
  // push b in opposite directions from R0, so that each error visits its own
  // corrector; the Y_b partner must follow X_b (it needs both correctors).
  auto force = [&](Bell b, double R) { return -(value(b, R + h) - value(b, R - h)) / (2 * h); };
  for (Bell p : kAllBell) {
    if (out.coincide(p, z_partner(p))) continue;
    for (const Minimum& m : out.minima_of(p)) {
      const double fz = force(z_partner(p), m.R);
      const double fx = force(x_partner(p), m.R);
      const double fy = force(y_partner(p), m.R);
      if (fz * fx < 0.0 && fy * fx > 0.0)
        out.protected_candidates.push_back({p, fz > 0.0, fz, fx, fy});
    }
  }
  return out;
}

ParallelFieldReport parallel_field_report(const SpinPattern& pattern, double r_min, double r_max) {
  if (!(r_max > r_min)) throw std::invalid_argument("parallel_field_report: empty range");
  const auto& R = pattern.R;
  if (r_min < R(0) - 1e-12 || r_max > R(R.size() - 1) + 1e-12)
    throw std::invalid_argument("parallel_field_report: range outside the grid");
  double integral = 0.0, span = 0.0;
  for (Eigen::Index i = 1; i < R.size(); ++i) {
    const double lo = std::max(R(i - 1), r_min), hi = std::min(R(i), r_max);
    if (!(hi > lo)) continue;
    // linear interpolation inside the cell
    auto at = [&](double x) {
      const double t = (x - R(i - 1)) / (R(i) - R(i - 1));
      return pattern.jpar(i - 1) + t * (pattern.jpar(i) - pattern.jpar(i - 1));
    };
    integral += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    span += hi - lo;
  }
  if (span == 0.0) return {0.0, 0.0};
  const double mean = integral / span;
  return {mean, mean / (kTwoPi * kZeemanHzPerGauss)};
}

DressedLifetime dressed_lifetime(double delta, double omega, double tau_r) {
  if (omega == 0.0) throw std::invalid_argument("dressed_lifetime: Omega must be non-zero");
  if (!(tau_r > 0.0)) throw std::invalid_argument("dressed_lifetime: tau_r must be positive");
  const double tau = sq(2 * delta / omega) * tau_r;
  return {tau, 1.0 / tau};
}

}  // namespace qubot
