#pragma once

// Algebraic model of the two-spin error-correcting nucleus: Pauli errors,
// corrector bookkeeping, the depolarizing joint-state expansion, and the
// equilibrium positions of the dipolar toy landscape.

#include <array>
#include <string>
#include <vector>

#include "qubot/quantum_core.hpp"

namespace qubot::logical {

enum class Pauli1 { I, X, Y, Z };

// i^k with k in {0,1,2,3}: +1, +i, -1, -i.
struct Phase {
  int k = 0;
  cplx value() const;
  friend Phase operator*(Phase l, Phase r) { return Phase{(l.k + r.k) % 4}; }
  friend bool operator==(Phase, Phase) = default;
};

// phase * (factor_a (x) factor_b)
struct PauliString {
  Pauli1 a = Pauli1::I;
  Pauli1 b = Pauli1::I;
  Phase phase{};

  SpinOperator matrix() const;
  std::string name() const;
  friend bool operator==(const PauliString&, const PauliString&) = default;
};

PauliString operator*(const PauliString& l, const PauliString& r);

// Single-qubit product with exact phase: returns (phase, factor) such that
// l * r = phase * factor.
std::pair<Phase, Pauli1> multiply(Pauli1 l, Pauli1 r);

struct CorrectorRegister {
  bool mu1 = false;  // L1
  bool mu2 = false;  // L2
  friend bool operator==(const CorrectorRegister&, const CorrectorRegister&) = default;
};

enum class Corrector { L1, L2 };

// Phase carried by the L1 unitary (-Z_b X_L1 with the default). This is the
// only choice that reproduces the signs of the corrected-state column and of
// the post-correction joint state; +1 gives agreement up to a global phase.
struct CorrectorConvention {
  int l1_phase = -1;
};

struct CorrectionOutcome {
  SpinState state;
  CorrectorRegister reg;
  std::vector<Corrector> path;
};

// Logical basis |0L> = |psi->, |1L> = |phi->.
SpinState logical_state(cplx alpha, cplx beta);

// Applies the error, then fires correctors according to the Bell sector of
// each branch: psi+/phi+ sectors visit L1 (Z_b), swapped psi-/phi- visit L2
// (X_b). Throws std::invalid_argument if `logical` has weight outside
// span{psi-, phi-}.
CorrectionOutcome apply_error_and_correct(const PauliString& error, const SpinState& logical,
                                          CorrectorRegister reg,
                                          CorrectorConvention conv = {});

// ---------------------------------------------------------------------------
// error/correction table

struct Table1Row {
  PauliString error;
  std::array<std::pair<int, Bell>, 2> expected;  // image of psi-, phi- as (sign, Bell)
  std::array<int, 2> corrected;                   // signs multiplying alpha, beta
};

// The six rows as printed: X_a, X_b, Z_a, Z_b, Z_aX_a, Z_bX_b.
const std::vector<Table1Row>& table1_rows();

struct Table1Cell {
  std::string error;
  Bell column;
  int expected_sign;
  Bell expected_bell;
  int computed_sign;  // 0 when the image is not +-1 times a Bell state
  Bell computed_bell;
  bool pass;
};

struct Table1CorrectedRow {
  std::string error;
  std::array<int, 2> expected;
  std::array<cplx, 2> computed;  // coefficients of |0L>, |1L> for alpha=beta=1
  bool pass;
};

struct Table1Report {
  std::vector<Table1Cell> cells;               // 12
  std::vector<Table1CorrectedRow> corrected;   // 6
  bool all_pass() const;
};

// `rows` defaults to table1_rows(); tests inject corrupted expectations.
Table1Report table1_verify(CorrectorConvention conv = {});
Table1Report table1_verify(const std::vector<Table1Row>& rows, CorrectorConvention conv = {});

// ---------------------------------------------------------------------------
// Depolarizing channel on particle b

struct JointBranch {
  cplx weight;  // amplitude multiplying the branch
  SpinState state;
  int environment;  // index j of |e_j>
  CorrectorRegister reg;
};

// Branches of the joint particle-environment-corrector state after the
// channel: sqrt(1-p) no error, sqrt(p/3) each for X_b, Z_b and Z_bX_b. Zero
// weight branches are dropped. Throws std::invalid_argument for p outside
// [0,1] or an unnormalized (alpha, beta).
std::vector<JointBranch> depolarize_joint(cplx alpha, cplx beta, double p);

// Runs the correctors on every branch.
std::vector<JointBranch> correct_joint(const std::vector<JointBranch>& branches,
                                       CorrectorConvention conv = {});

// <Psi| Tr_{env,corr} rho |Psi> after depolarizing and correction.
double logical_fidelity_after_correction(cplx alpha, cplx beta, double p);

// |<Psi| E |Psi>|^2 for an error applied with no corrector acting.
double uncorrected_fidelity(const PauliString& error, cplx alpha, cplx beta);

// ---------------------------------------------------------------------------
// Dipolar toy model: V(R) = V0 (R - delta)^2 + (d2 / R^3) <W>

struct DipolarModelParams {
  double V0 = 1.0;
  double delta = 1.0;
  double d2 = 0.01;
  double jx = 1.0;
  double jy = -3.0;
  double jz = 6.0;

  void validate() const;
};

// Pattern of the illustrative landscape: j_y = -3 j_x, j_z = 6 j_x.
DipolarModelParams reference_dipolar_params();

double expectation_w(const DipolarModelParams& p, Bell b);
double dipolar_potential(const DipolarModelParams& p, Bell b, double R);

struct Equilibrium {
  double R;
  bool is_minimum;
  double residual;  // |R^4 (R - delta) - rhs|
};

struct EquilibriumResult {
  Bell bell;
  double w;    // <W>
  double rhs;  // 3 d2 <W> / (2 V0)
  std::vector<Equilibrium> roots;
  bool has_minimum() const;
};

// Real positive roots of R^4 (R - delta) = 3 d2 <W> / (2 V0), via companion
// matrix eigenvalues polished by Newton steps.
EquilibriumResult solve_equilibria(const DipolarModelParams& params, Bell bell);

}  // namespace qubot::logical
