#include "qubot/mcwf.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "qubot/potentials.hpp"

namespace qubot {

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double StreamRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double ScriptedSource::uniform() {
  if (next_ >= values_.size()) throw std::out_of_range("ScriptedSource: no values left");
  return values_[next_++];
}

// ---------------------------------------------------------------------------

double TrapCenters::of(Bell b) const {
  switch (b) {
    case Bell::phi_plus: return phi_plus;
    case Bell::phi_minus: return phi_minus;
    default: return psi;
  }
}

TrapCenters trap_centers_from_landscape(const Landscape& land, double* origin_um) {
  auto lowest = [&](Bell b) {
    const auto& ms = land.minima_of(b);
    if (ms.empty())
      throw std::invalid_argument(std::string("trap_centers_from_landscape: no minimum for ") +
                                  std::string(to_string(b)));
    const Minimum* best = &ms.front();
    for (const auto& m : ms)
      if (m.V < best->V) best = &m;
    return best->R;
  };
  const double origin = lowest(Bell::phi_plus);
  // psi+ may lack a minimum; the psi sector then follows psi-.
  const double psi = lowest(Bell::psi_minus);
  if (origin_um) *origin_um = origin;
  return {0.0, lowest(Bell::phi_minus) - origin, psi - origin};
}

void SimParams::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SimParams: ") + what);
  };
  need(gamma >= 0.0 && std::isfinite(gamma), "gamma must be >= 0");
  need(omega_t > 0.0 && std::isfinite(omega_t), "omega_t must be positive");
  need(kappa >= 0.0 && std::isfinite(kappa), "kappa must be >= 0");
  need(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  need(t_final >= dt, "t_final must be at least one step");
  need(corrector_width > 0.0, "corrector_width must be positive");
  need(std::isfinite(R_L1) && std::isfinite(R_L2), "corrector positions must be finite");
  need(zpm > 0.0, "zero-point motion must be positive");
  need(wavepacket_width > 0.0, "wavepacket width must be positive");
  need(fock_dim >= 8, "fock_dim must be >= 8");
  need(tail_tol > 0.0 && tail_tol < 1.0, "tail_tol must be in (0,1)");
  need(nbar >= 0.0 && std::isfinite(nbar), "nbar must be >= 0");
  need(record_stride >= 1, "record_stride must be >= 1");
  need(gamma * dt < kMaxStepJumpProbability, "gamma * dt must be < 0.1");
}

long SimParams::steps() const { return std::lround(t_final / dt); }

const char* to_string(JumpKind k) {
  switch (k) {
    case JumpKind::L1_correct: return "L1_correct";
    case JumpKind::L2_correct: return "L2_correct";
    case JumpKind::depol_X: return "depol_X";
    case JumpKind::depol_Y: return "depol_Y";
    case JumpKind::depol_Z: return "depol_Z";
    case JumpKind::phonon_decay: return "phonon_decay";
    case JumpKind::phonon_excite: return "phonon_excite";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd motion_hamiltonian(double center_um, const SimParams& p) {
  const LadderPair l = ladder(p.fock_dim);
  const double g = p.omega_t * center_um / (2.0 * p.zpm);
  return p.omega_t * (l.a_dag.matrix * l.a.matrix) - g * (l.a.matrix + l.a_dag.matrix);
}

Eigen::MatrixXcd motion_hamiltonian(const SpinState& spin, const SimParams& p) {
  const auto ray = classify_bell(spin, 1e-6);
  if (!ray) throw std::invalid_argument("motion_hamiltonian: spin is not a Bell state");
  return motion_hamiltonian(p.centers.of(ray->label), p);
}

Eigen::MatrixXcd no_jump_propagator(const Eigen::MatrixXcd& H, double kappa, double nbar, double dt) {
  const Eigen::Index n = H.rows();
  const LadderPair l = ladder(static_cast<int>(n));
  const Eigen::MatrixXcd num = l.a_dag.matrix * l.a.matrix;
  const Eigen::MatrixXcd anti = l.a.matrix * l.a_dag.matrix;
  const Eigen::MatrixXcd heff = H - cplx(0, 0.5) * kappa * ((nbar + 1.0) * num + nbar * anti);
  const Eigen::MatrixXcd gen = cplx(0, -dt) * heff;
  return gen.exp();
}

double phonon_jump_probability(const MotionState& phi, double kappa, double nbar, double dt) {
  const Eigen::VectorXcd& c = phi.amplitudes();
  const Eigen::Index n = c.size();
  // <a^dag a> and <a a^dag> in the truncated space
  double num = 0.0, anti = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pk = std::norm(c(k));
    num += pk * static_cast<double>(k);
    if (k + 1 < n) anti += pk * static_cast<double>(k + 1);
  }
  return kappa * dt * ((nbar + 1.0) * num + nbar * anti);
}

std::optional<JumpKind> mmc_step(MotionState& phi, const Eigen::MatrixXcd& U, double kappa,
                                 double nbar, double dt, UniformSource& rng, double tail_tol) {
  const Eigen::VectorXcd& c = phi.amplitudes();
  const Eigen::Index n = c.size();
  double num = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) num += std::norm(c(k)) * static_cast<double>(k);
  const double dv_down = kappa * (nbar + 1.0) * dt * num;
  const double dv_up = phonon_jump_probability(phi, kappa, nbar, dt) - dv_down;
  if (dv_down + dv_up >= kMaxStepJumpProbability) {
    std::ostringstream msg;
    msg << "mmc_step: jump probability " << dv_down + dv_up << " per step is too large";
    throw StepSizeError(msg.str());
  }
  const double q = rng.uniform();
  Eigen::VectorXcd next(n);
  std::optional<JumpKind> jump;
  if (q < dv_down) {
    next.setZero();
    for (Eigen::Index k = 1; k < n; ++k) next(k - 1) = std::sqrt(static_cast<double>(k)) * c(k);
    jump = JumpKind::phonon_decay;
  } else if (q < dv_down + dv_up) {
    next.setZero();
    for (Eigen::Index k = 0; k + 1 < n; ++k) next(k + 1) = std::sqrt(static_cast<double>(k + 1)) * c(k);
    jump = JumpKind::phonon_excite;
  } else {
    next.noalias() = U * c;
  }
  const double norm = next.norm();
  if (!(norm > 0.0)) throw std::runtime_error("mmc_step: state collapsed to zero");
  next /= norm;
  phi = MotionState(std::move(next), phi.frame(), tail_tol);
  return jump;
}

CorrectionRates correction_rates(const MotionState& phi, const SimParams& p) {
  const double d1 = position_density(phi, p.R_L1, p.tail_tol) * p.corrector_width;
  const double d2 = position_density(phi, p.R_L2, p.tail_tol) * p.corrector_width;
  if (d1 > 1.0 || d2 > 1.0) throw StepSizeError("correction_rates: gamma * dt exceeds 1");
  return {d1 / p.dt, d2 / p.dt};
}

SmmcState initial_state(const SimParams& p) {
  return {bell_state(Bell::phi_plus),
          gaussian_wavepacket(p.wavepacket_width, p.frame(), p.fock_dim, p.tail_tol), Bell::phi_plus};
}

// ---------------------------------------------------------------------------

SmmcEngine::SmmcEngine(SimParams params) : p_(std::move(params)) {
  p_.validate();
  for (int level = 0; level <= kMaxSubdivision; ++level)
    for (Bell b : kAllBell)
      U_[level][static_cast<int>(b)] = no_jump_propagator(
          motion_hamiltonian(p_.centers.of(b), p_), p_.kappa, p_.nbar, p_.dt / (1 << level));
  chi1_ = hermite_functions(p_.R_L1, p_.zpm, p_.fock_dim).cast<cplx>();
  chi2_ = hermite_functions(p_.R_L2, p_.zpm, p_.fock_dim).cast<cplx>();
  jumps_ = {pauli(Axis::x, Particle::b).matrix(), pauli(Axis::y, Particle::b).matrix(),
            pauli(Axis::z, Particle::b).matrix()};
  // Every collapse operator is a rate times a Pauli on b, so sum L^dag L is
  // proportional to the identity and the no-jump spin evolution is a pure
  // renormalization.
  for (const Matrix4c& j : jumps_)
    if (!(j.adjoint() * j - Matrix4c::Identity()).isZero(1e-12))
      throw std::logic_error("SmmcEngine: spin collapse operators are not unitary");
}

CorrectionRates SmmcEngine::rates(const MotionState& phi) const {
  if (!p_.correctors_enabled) return {0.0, 0.0};
  check_tail(phi.amplitudes(), p_.tail_tol);
  const double d1 = std::norm(chi1_.dot(phi.amplitudes())) * p_.corrector_width;
  const double d2 = std::norm(chi2_.dot(phi.amplitudes())) * p_.corrector_width;
  if (d1 > 1.0 || d2 > 1.0) throw StepSizeError("correction_rates: gamma * dt exceeds 1");
  return {d1 / p_.dt, d2 / p_.dt};
}

void SmmcEngine::step(SmmcState& s, double t, UniformSource& rng, std::vector<JumpEvent>* events) const {
  const CorrectionRates r = rates(s.motion);
  const double d1 = r.gamma_L1 * p_.dt, d2 = r.gamma_L2 * p_.dt;
  const double d3 = p_.gamma * p_.dt / 3.0;
  if (d1 + d2 + 3 * d3 >= kMaxStepJumpProbability) {
    std::ostringstream msg;
    msg << "smmc step: spin jump probability " << d1 + d2 + 3 * d3 << " per step is too large";
    throw StepSizeError(msg.str());
  }

  const double u = rng.uniform();
  const Bell before = s.sector;
  std::optional<JumpKind> kind;
  const Matrix4c* op = nullptr;
  double collapse_at = 0.0;
  if (u < d1) {
    kind = JumpKind::L1_correct; op = &jumps_[2]; collapse_at = p_.R_L1;
  } else if (u < d1 + d2) {
    kind = JumpKind::L2_correct; op = &jumps_[0]; collapse_at = p_.R_L2;
  } else if (u < d1 + d2 + d3) {
    kind = JumpKind::depol_X; op = &jumps_[0];
  } else if (u < d1 + d2 + 2 * d3) {
    kind = JumpKind::depol_Y; op = &jumps_[1];
  } else if (u < d1 + d2 + 3 * d3) {
    kind = JumpKind::depol_Z; op = &jumps_[2];
  }

  const double t_end = t + p_.dt;
  if (kind) {
    s.spin = SpinState::normalized(*op * s.spin.amplitudes());
    if (kind == JumpKind::L1_correct || kind == JumpKind::L2_correct)
      s.motion = displaced_ground_state(collapse_at, p_.frame(), p_.fock_dim, p_.tail_tol);
  }
  // The motion evolves under the Hamiltonian of the pre-jump spin for this
  // step; the new one takes over from the next step.
  const auto phonon = advance_motion(s.motion, before, rng);

  if (kind) {
    const auto ray = classify_bell(s.spin, 1e-9);
    if (!ray) throw std::logic_error("smmc step: spin left the Bell basis");
    s.sector = ray->label;
    if (events) {
      JumpEvent e{t_end, *kind, before, s.sector};
      if (kind == JumpKind::L1_correct || kind == JumpKind::L2_correct) e.collapse_position = collapse_at;
      events->push_back(e);
    }
  }
  if (phonon && events && p_.record_phonon_events) events->push_back({t_end, *phonon, s.sector, s.sector});
}

std::optional<JumpKind> SmmcEngine::advance_motion(MotionState& phi, Bell sector,
                                                   UniformSource& rng) const {
  // Time is tracked in units of dt / 2^kMaxSubdivision; the sub-step is
  // re-chosen after every update because a jump can change <a^dag a>.
  constexpr int full = 1 << kMaxSubdivision;
  int remaining = full;
  std::optional<JumpKind> last;
  while (remaining > 0) {
    const double dv = phonon_jump_probability(phi, p_.kappa, p_.nbar, p_.dt);
    int level = 0;
    while (level < kMaxSubdivision &&
           (dv / (1 << level) >= kMaxStepJumpProbability || (full >> level) > remaining))
      ++level;
    const auto j = mmc_step(phi, U_[level][static_cast<int>(sector)], p_.kappa, p_.nbar,
                            p_.dt / (1 << level), rng, p_.tail_tol);
    if (j) last = j;
    remaining -= full >> level;
  }
  return last;
}

TrajectoryRecord SmmcEngine::run(UniformSource& rng) const {
  SmmcState s = initial_state(p_);
  const long steps = p_.steps();
  const std::size_t n_rec = static_cast<std::size_t>(steps / p_.record_stride) + 1;
  TrajectoryRecord rec;
  for (auto* v : {&rec.times, &rec.overlap, &rec.pos_mean, &rec.pos_var, &rec.occupation,
                  &rec.gamma_L1, &rec.gamma_L2})
    v->reserve(n_rec);
  const SpinState& target = bell_state(Bell::phi_plus);
  auto record = [&](double t) {
    const CorrectionRates r = rates(s.motion);
    rec.times.push_back(t);
    rec.overlap.push_back(std::min(1.0, target.overlap(s.spin)));
    rec.pos_mean.push_back(s.motion.mean_position());
    rec.pos_var.push_back(s.motion.position_variance());
    rec.occupation.push_back(s.motion.mean_occupation());
    rec.gamma_L1.push_back(r.gamma_L1);
    rec.gamma_L2.push_back(r.gamma_L2);
  };
  record(0.0);
  for (long i = 1; i <= steps; ++i) {
    step(s, static_cast<double>(i - 1) * p_.dt, rng, &rec.events);
    if (i % p_.record_stride == 0) record(static_cast<double>(i) * p_.dt);
  }
  return rec;
}

TrajectoryRecord SmmcEngine::run(std::uint64_t seed, std::uint64_t index) const {
  StreamRng rng(seed, index);
  return run(rng);
}

TrajectoryRecord run_trajectory(const SimParams& p, std::uint64_t seed, std::uint64_t index) {
  return SmmcEngine(p).run(seed, index);
}

std::vector<TrajectoryRecord> run_ensemble(const SimParams& p, int n_traj, std::uint64_t seed,
                                           int workers) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: need at least one trajectory");
  const SmmcEngine engine(p);
  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(n_traj));
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_traj);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int i = next++; i < n_traj && !failed; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = engine.run(seed, static_cast<std::uint64_t>(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double nbar_from_temperature(double temperature_k, double omega_t) {
  if (!(temperature_k >= 0.0)) throw std::invalid_argument("nbar_from_temperature: T must be >= 0");
  if (temperature_k == 0.0) return 0.0;
  constexpr double hbar = 1.054571817e-34, kb = 1.380649e-23;
  return 1.0 / std::expm1(hbar * omega_t / (kb * temperature_k));
}

}  // namespace qubot
