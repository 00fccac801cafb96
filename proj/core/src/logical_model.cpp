#include "qubot/logical_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qubot::logical {

namespace {

constexpr double kCodeSpaceTol = 1e-9;

SpinOperator single_as_b(Pauli1 p) {
  switch (p) {
    case Pauli1::I: return identity_spin();
    case Pauli1::X: return pauli(Axis::x, Particle::b);
    case Pauli1::Y: return pauli(Axis::y, Particle::b);
    case Pauli1::Z: return pauli(Axis::z, Particle::b);
  }
  return identity_spin();
}

SpinOperator single_as_a(Pauli1 p) {
  switch (p) {
    case Pauli1::I: return identity_spin();
    case Pauli1::X: return pauli(Axis::x, Particle::a);
    case Pauli1::Y: return pauli(Axis::y, Particle::a);
    case Pauli1::Z: return pauli(Axis::z, Particle::a);
  }
  return identity_spin();
}

const char* single_name(Pauli1 p) {
  switch (p) {
    case Pauli1::I: return "I";
    case Pauli1::X: return "X";
    case Pauli1::Y: return "Y";
    case Pauli1::Z: return "Z";
  }
  return "?";
}

bool in_correction_sector(Bell b) { return b == Bell::psi_plus || b == Bell::phi_plus; }

// Decomposition of a code-space-derived vector into (Bell, coefficient) for
// the two logical branches.
struct Branch {
  Bell origin;
  Vector4c vec;  // unnormalized image of the origin basis vector
};

std::optional<Bell> branch_sector(const Vector4c& v) {
  const double n = v.norm();
  if (n == 0.0) return std::nullopt;
  auto ray = classify_bell(SpinState(v / n), 1e-9);
  if (!ray) return std::nullopt;
  return ray->label;
}

}  // namespace

cplx Phase::value() const {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

std::pair<Phase, Pauli1> multiply(Pauli1 l, Pauli1 r) {
  if (l == Pauli1::I) return {Phase{0}, r};
  if (r == Pauli1::I) return {Phase{0}, l};
  if (l == r) return {Phase{0}, Pauli1::I};
  // sigma_i sigma_j = i eps_ijk sigma_k
  const int li = static_cast<int>(l) - 1;
  const int ri = static_cast<int>(r) - 1;
  const int k = 3 - li - ri;
  const bool cyclic = (ri - li + 3) % 3 == 1;
  return {Phase{cyclic ? 1 : 3}, static_cast<Pauli1>(k + 1)};
}

PauliString operator*(const PauliString& l, const PauliString& r) {
  const auto [pa, fa] = multiply(l.a, r.a);
  const auto [pb, fb] = multiply(l.b, r.b);
  return PauliString{fa, fb, l.phase * r.phase * pa * pb};
}

SpinOperator PauliString::matrix() const {
  return phase.value() * (single_as_a(a) * single_as_b(b));
}

std::string PauliString::name() const {
  std::ostringstream s;
  static const char* phases[] = {"", "i", "-", "-i"};
  s << phases[phase.k % 4];
  if (a == Pauli1::I && b == Pauli1::I) s << "I";
  if (a != Pauli1::I) s << single_name(a) << "_a";
  if (b != Pauli1::I) s << single_name(b) << "_b";
  return s.str();
}

SpinState logical_state(cplx alpha, cplx beta) {
  return SpinState(alpha * bell_state(Bell::psi_minus).amplitudes() +
                   beta * bell_state(Bell::phi_minus).amplitudes());
}

CorrectionOutcome apply_error_and_correct(const PauliString& error, const SpinState& logical,
                                          CorrectorRegister reg, CorrectorConvention conv) {
  const cplx alpha = bell_state(Bell::psi_minus).inner(logical);
  const cplx beta = bell_state(Bell::phi_minus).inner(logical);
  if (std::norm(alpha) + std::norm(beta) < 1.0 - kCodeSpaceTol)
    throw std::invalid_argument("apply_error_and_correct: state is outside the code space");

  const SpinOperator err = error.matrix();
  const SpinOperator zb = cplx(conv.l1_phase) * pauli(Axis::z, Particle::b);
  const SpinOperator xb = pauli(Axis::x, Particle::b);

  // Both logical branches are tracked separately so that the corrector path
  // is decided from where each branch sits; a corrector cannot tell them apart,
  // so they must agree.
  std::vector<Branch> branches;
  branches.push_back({Bell::psi_minus, err.matrix() * bell_state(Bell::psi_minus).amplitudes()});
  branches.push_back({Bell::phi_minus, err.matrix() * bell_state(Bell::phi_minus).amplitudes()});

  CorrectionOutcome out{logical, reg, {}};
  for (int guard = 0; guard < 4; ++guard) {
    std::optional<Corrector> next;
    for (const Branch& br : branches) {
      const auto sector = branch_sector(br.vec);
      if (!sector) throw std::logic_error("apply_error_and_correct: branch left the Bell basis");
      std::optional<Corrector> want;
      if (in_correction_sector(*sector))
        want = Corrector::L1;
      else if (*sector != br.origin)
        want = Corrector::L2;
      if (!want) continue;
      if (next && *next != *want)
        throw std::logic_error("apply_error_and_correct: branches disagree on corrector path");
      next = want;
    }
    if (!next) break;
    const SpinOperator& op = *next == Corrector::L1 ? zb : xb;
    for (Branch& br : branches) br.vec = op.matrix() * br.vec;
    if (*next == Corrector::L1)
      out.reg.mu1 = !out.reg.mu1;
    else
      out.reg.mu2 = !out.reg.mu2;
    out.path.push_back(*next);
  }
  out.state = SpinState::normalized(alpha * branches[0].vec + beta * branches[1].vec);
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<Table1Row>& table1_rows() {
  using P = Pauli1;
  static const std::vector<Table1Row> rows = {
      {PauliString{P::X, P::I}, {{{-1, Bell::phi_minus}, {-1, Bell::psi_minus}}}, {-1, -1}},
      {PauliString{P::I, P::X}, {{{+1, Bell::phi_minus}, {+1, Bell::psi_minus}}}, {+1, +1}},
      {PauliString{P::Z, P::I}, {{{+1, Bell::psi_plus}, {+1, Bell::phi_plus}}}, {+1, -1}},
      {PauliString{P::I, P::Z}, {{{-1, Bell::psi_plus}, {+1, Bell::phi_plus}}}, {-1, -1}},
      // Z_a X_a = i Y_a, Z_b X_b = i Y_b
      {PauliString{P::Y, P::I, Phase{1}}, {{{-1, Bell::phi_plus}, {-1, Bell::psi_plus}}}, {+1, -1}},
      {PauliString{P::I, P::Y, Phase{1}}, {{{+1, Bell::phi_plus}, {-1, Bell::psi_plus}}}, {-1, -1}},
  };
  return rows;
}

bool Table1Report::all_pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.pass; }) &&
         std::all_of(corrected.begin(), corrected.end(), [](const auto& c) { return c.pass; });
}

Table1Report table1_verify(CorrectorConvention conv) { return table1_verify(table1_rows(), conv); }

Table1Report table1_verify(const std::vector<Table1Row>& rows, CorrectorConvention conv) {
  constexpr double tol = 1e-12;
  Table1Report report;
  const std::array<Bell, 2> columns = {Bell::psi_minus, Bell::phi_minus};
  for (const Table1Row& row : rows) {
    const SpinOperator op = row.error.matrix();
    for (int c = 0; c < 2; ++c) {
      const Vector4c image = op.matrix() * bell_state(columns[c]).amplitudes();
      Table1Cell cell{row.error.name(), columns[c], row.expected[c].first, row.expected[c].second,
                      0, Bell::psi_minus, false};
      for (Bell b : kAllBell) {
        const cplx amp = bell_state(b).inner(SpinState::normalized(image));
        if (std::abs(amp - 1.0) < tol) cell.computed_sign = +1;
        else if (std::abs(amp + 1.0) < tol) cell.computed_sign = -1;
        else continue;
        cell.computed_bell = b;
        break;
      }
      cell.pass = cell.computed_sign == cell.expected_sign && cell.computed_bell == cell.expected_bell;
      report.cells.push_back(cell);
    }
    // Corrected state; linearity lets alpha and beta be read off one run each.
    std::array<cplx, 2> computed{};
    for (int c = 0; c < 2; ++c) {
      const auto out = apply_error_and_correct(row.error, bell_state(columns[c]), {}, conv);
      const cplx on_same = bell_state(columns[c]).inner(out.state);
      computed[c] = on_same;
    }
    const bool pass = std::abs(computed[0] - double(row.corrected[0])) < tol &&
                      std::abs(computed[1] - double(row.corrected[1])) < tol;
    report.corrected.push_back({row.error.name(), row.corrected, computed, pass});
  }
  return report;
}

// ---------------------------------------------------------------------------

const std::array<PauliString, 4>& channel_errors() {
  static const std::array<PauliString, 4> errs = {
      PauliString{}, PauliString{Pauli1::I, Pauli1::X}, PauliString{Pauli1::I, Pauli1::Z},
      PauliString{Pauli1::I, Pauli1::Y, Phase{1}}};  // Z_bX_b = iY_b
  return errs;
}

std::vector<JointBranch> depolarize_joint(cplx alpha, cplx beta, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarize_joint: p must be in [0,1]");
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTolerance)
    throw std::invalid_argument("depolarize_joint: |alpha|^2 + |beta|^2 must be 1");
  const SpinState psi = logical_state(alpha, beta);
  const double w0 = std::sqrt(1.0 - p);
  const double w1 = std::sqrt(p / 3.0);
  std::vector<JointBranch> out;
  for (int j = 0; j < 4; ++j) {
    const double w = j == 0 ? w0 : w1;
    if (w == 0.0) continue;
    out.push_back({w, SpinState(psi.apply(channel_errors()[j].matrix())), j, CorrectorRegister{}});
  }
  return out;
}

std::vector<JointBranch> correct_joint(const std::vector<JointBranch>& branches,
                                       CorrectorConvention conv) {
  std::vector<JointBranch> out;
  out.reserve(branches.size());
  for (const JointBranch& br : branches) {
    if (br.environment < 0 || br.environment > 3)
      throw std::invalid_argument("correct_joint: environment index out of range");
    // The environment index records which error hit; undo it to get the
    // logical state and let the correctors act component by component.
    const PauliString& err = channel_errors()[br.environment];
    const SpinState logical(err.matrix().matrix().adjoint() * br.state.amplitudes());
    const auto res = apply_error_and_correct(err, logical, br.reg, conv);
    out.push_back({br.weight, res.state, br.environment, res.reg});
  }
  return out;
}

double logical_fidelity_after_correction(cplx alpha, cplx beta, double p) {
  const SpinState psi = logical_state(alpha, beta);
  const auto corrected = correct_joint(depolarize_joint(alpha, beta, p));
  // Environment states are orthonormal, so tracing them out leaves an
  // incoherent mixture of the branch states.
  double f = 0.0;
  for (const auto& br : corrected) f += std::norm(br.weight) * psi.overlap(br.state);
  return f;
}

double uncorrected_fidelity(const PauliString& error, cplx alpha, cplx beta) {
  const SpinState psi = logical_state(alpha, beta);
  return std::norm(psi.amplitudes().dot(psi.apply(error.matrix())));
}

// ---------------------------------------------------------------------------

void DipolarModelParams::validate() const {
  if (!(V0 > 0.0)) throw std::invalid_argument("DipolarModelParams: V0 must be positive");
  if (!std::isfinite(delta) || !std::isfinite(d2) || !std::isfinite(jx) || !std::isfinite(jy) ||
      !std::isfinite(jz))
    throw std::invalid_argument("DipolarModelParams: non-finite parameter");
}

DipolarModelParams reference_dipolar_params() { return DipolarModelParams{}; }

double expectation_w(const DipolarModelParams& p, Bell b) {
  return bell_eigenvalue(b, p.jx, p.jy, p.jz);
}

double dipolar_potential(const DipolarModelParams& p, Bell b, double R) {
  return p.V0 * (R - p.delta) * (R - p.delta) + p.d2 * expectation_w(p, b) / (R * R * R);
}

bool EquilibriumResult::has_minimum() const {
  return std::any_of(roots.begin(), roots.end(), [](const Equilibrium& e) { return e.is_minimum; });
}

EquilibriumResult solve_equilibria(const DipolarModelParams& params, Bell bell) {
  params.validate();
  EquilibriumResult res{bell, expectation_w(params, bell), 0.0, {}};
  res.rhs = 3.0 * params.d2 * res.w / (2.0 * params.V0);
  const double delta = params.delta;
  const double c = res.rhs;

  // R^5 - delta R^4 + 0 R^3 + 0 R^2 + 0 R - c = 0
  Eigen::Matrix<double, 5, 5> companion = Eigen::Matrix<double, 5, 5>::Zero();
  companion.block<4, 4>(1, 0).setIdentity();
  companion(0, 4) = c;
  companion(4, 4) = delta;
  const Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> es(companion, false);

  const double scale = std::max({std::abs(delta), std::pow(std::abs(c), 0.2), 1e-300});
  auto f = [&](double R) { return R * R * R * R * (R - delta) - c; };
  auto df = [&](double R) { return 5.0 * R * R * R * R - 4.0 * delta * R * R * R; };

  for (int i = 0; i < 5; ++i) {
    const cplx z = es.eigenvalues()(i);
    if (std::abs(z.imag()) >= 1e-8 * std::max(1.0, scale)) continue;
    double R = z.real();
    if (!(R > 1e-6 * scale)) continue;
    for (int it = 0; it < 50; ++it) {
      const double d = df(R);
      if (d == 0.0) break;
      const double step = f(R) / d;
      R -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(R))) break;
    }
    if (!(R > 1e-6 * scale)) continue;
    const bool dup = std::any_of(res.roots.begin(), res.roots.end(), [&](const Equilibrium& e) {
      return std::abs(e.R - R) < 1e-9 * std::max(1.0, R);
    });
    if (dup) continue;
    // V'' = 2 V0 + 12 d2 <W> / R^5
    const double curvature = 2.0 * params.V0 + 12.0 * params.d2 * res.w / std::pow(R, 5);
    res.roots.push_back({R, curvature > 0.0, std::abs(f(R))});
  }
  std::sort(res.roots.begin(), res.roots.end(),
            [](const Equilibrium& l, const Equilibrium& r) { return l.R < r.R; });
  return res;
}

}  // namespace qubot::logical
