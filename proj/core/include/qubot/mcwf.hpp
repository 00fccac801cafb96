#pragma once

// Spin-motion Monte Carlo wavefunction dynamics of the mobile atom: damped
// (optionally thermal) harmonic motion in a spin-dependent trap, corrective
// spin jumps triggered by position, and depolarization of particle b.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "qubot/quantum_core.hpp"

namespace qubot {

struct Landscape;

// ---------------------------------------------------------------------------
// Random numbers

class UniformSource {
 public:
  virtual ~UniformSource() = default;
  // Uniform in [0, 1).
  virtual double uniform() = 0;
};

// Independent stream for trajectory `index` of an ensemble seeded with `seed`.
class StreamRng final : public UniformSource {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t index);
  double uniform() override;

 private:
  std::mt19937_64 engine_;
};

// Replays a fixed list of uniforms; throws std::out_of_range when exhausted.
class ScriptedSource final : public UniformSource {
 public:
  explicit ScriptedSource(std::vector<double> values) : values_(std::move(values)) {}
  double uniform() override;
  std::size_t consumed() const { return next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

// ---------------------------------------------------------------------------

// Frame-relative equilibrium positions of the mobile atom per Bell sector.
struct TrapCenters {
  double phi_plus = 0.0;
  double phi_minus = 0.30;
  double psi = -0.26;  // shared by psi+ and psi-

  double of(Bell b) const;
};

// Equilibria from a landscape, relative to the phi+ minimum. Returns the
// absolute phi+ position through `origin_um`. Throws std::invalid_argument
// when a sector has no minimum.
TrapCenters trap_centers_from_landscape(const Landscape& land, double* origin_um = nullptr);

struct SimParams {
  double gamma = 100.0;                       // depolarizing rate, 1/s
  double omega_t = 6.283185307179586e3;       // rad/s
  double kappa = 1e-4 * omega_t * omega_t;    // 1/s
  double dt = 5e-6;
  double t_final = 20e-3;
  double R_L1 = 0.63;   // Z_b corrector, frame-relative um
  double R_L2 = -0.63;  // X_b corrector
  double corrector_width = 0.010;
  TrapCenters centers{};
  double frame_origin = 1.90;  // absolute position of the frame origin (reporting only)
  double zpm = 0.23;
  double wavepacket_width = 0.22;
  int fock_dim = 32;
  double tail_tol = kDefaultTailTolerance;
  double nbar = 0.0;
  bool correctors_enabled = true;
  int record_stride = 20;
  bool record_phonon_events = false;

  // Throws std::invalid_argument.
  void validate() const;
  long steps() const;
  MotionFrame frame() const { return {0.0, zpm}; }
};

enum class JumpKind { L1_correct, L2_correct, depol_X, depol_Y, depol_Z, phonon_decay, phonon_excite };
const char* to_string(JumpKind k);

struct JumpEvent {
  double time;
  JumpKind kind;
  Bell spin_before;
  Bell spin_after;
  double collapse_position = std::numeric_limits<double>::quiet_NaN();  // corrective jumps only
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> overlap;     // |<psi|phi+>|^2
  std::vector<double> pos_mean;    // frame-relative um
  std::vector<double> pos_var;
  std::vector<double> occupation;  // <a^dag a>
  std::vector<double> gamma_L1;    // 1/s
  std::vector<double> gamma_L2;
  std::vector<JumpEvent> events;
};

// A jump probability budget per step that the first-order expansion tolerates.
inline constexpr double kMaxStepJumpProbability = 0.1;

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// H = omega_t a^dag a - g (a + a^dag), g = omega_t * center / (2 zpm).
Eigen::MatrixXcd motion_hamiltonian(double center_um, const SimParams& p);
// Resolves the sector of `spin`; throws std::invalid_argument if it is not a
// Bell ray to 1e-6.
Eigen::MatrixXcd motion_hamiltonian(const SpinState& spin, const SimParams& p);

// exp(-i (H - (i/2) kappa [(nbar+1) a^dag a + nbar a a^dag]) dt)
Eigen::MatrixXcd no_jump_propagator(const Eigen::MatrixXcd& H, double kappa, double nbar, double dt);

// Phonon jump probability kappa dt [(nbar+1)<a^dag a> + nbar <a a^dag>].
double phonon_jump_probability(const MotionState& phi, double kappa, double nbar, double dt);

// One MMC step with a precomputed no-jump propagator. Draws one uniform.
// Returns the ladder jump that occurred, if any. Throws TruncationError if the
// new state (e.g. after an a^dag jump) has population in the tail,
// StepSizeError if the jump probability is too large.
std::optional<JumpKind> mmc_step(MotionState& phi, const Eigen::MatrixXcd& U, double kappa,
                                 double nbar, double dt, UniformSource& rng,
                                 double tail_tol = kDefaultTailTolerance);

struct CorrectionRates {
  double gamma_L1;  // 1/s
  double gamma_L2;
};

CorrectionRates correction_rates(const MotionState& phi, const SimParams& p);

struct SmmcState {
  SpinState spin;
  MotionState motion;
  Bell sector;  // Bell label of `spin`, kept consistent with the Hamiltonian
};

// Initial |phi+> (x) Gaussian wavepacket at the frame origin.
SmmcState initial_state(const SimParams& p);

// Engine with per-sector propagators and corrector wavefunctions cached.
class SmmcEngine {
 public:
  explicit SmmcEngine(SimParams params);

  const SimParams& params() const { return p_; }
  const Eigen::MatrixXcd& propagator(Bell b) const { return U_[0][static_cast<int>(b)]; }
  CorrectionRates rates(const MotionState& phi) const;

  // One SMMC step at time t; appends spin and collapse events to `events`
  // (may be null). Asserts the monitored-model invariants.
  void step(SmmcState& s, double t, UniformSource& rng, std::vector<JumpEvent>* events) const;

  TrajectoryRecord run(UniformSource& rng) const;
  TrajectoryRecord run(std::uint64_t seed, std::uint64_t index) const;

 private:
  // Motion update for one step of the given sector. Splits the step into
  // 2^k sub-steps (k <= kMaxSubdivision) when the phonon jump probability
  // would exceed the first-order budget.
  std::optional<JumpKind> advance_motion(MotionState& phi, Bell sector, UniformSource& rng) const;

  static constexpr int kMaxSubdivision = 4;
  SimParams p_;
  // U_[level][sector]: no-jump propagator over dt / 2^level
  std::array<std::array<Eigen::MatrixXcd, 4>, kMaxSubdivision + 1> U_;
  Eigen::VectorXcd chi1_, chi2_;
  std::array<Matrix4c, 3> jumps_;  // X_b, Y_b, Z_b
};

TrajectoryRecord run_trajectory(const SimParams& p, std::uint64_t seed, std::uint64_t index = 0);

// Trajectories 0..n-1 on `workers` threads (0 = hardware concurrency). The
// result does not depend on the number of workers.
std::vector<TrajectoryRecord> run_ensemble(const SimParams& p, int n_traj, std::uint64_t seed,
                                           int workers = 0);

// Bose occupation 1/(exp(hbar omega / k_B T) - 1), T in kelvin.
double nbar_from_temperature(double temperature_k, double omega_t);

}  // namespace qubot
