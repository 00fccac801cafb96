#include "qubot/quantum_core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qubot {

namespace {

using Matrix2c = Eigen::Matrix<cplx, 2, 2>;

Matrix2c single_pauli(Axis axis) {
  Matrix2c m;
  switch (axis) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix4c kron(const Matrix2c& l, const Matrix2c& r) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = l(i, j) * r;
  return out;
}

}  // namespace

std::string_view to_string(Bell b) {
  switch (b) {
    case Bell::psi_minus: return "psi_minus";
    case Bell::phi_minus: return "phi_minus";
    case Bell::psi_plus: return "psi_plus";
    case Bell::phi_plus: return "phi_plus";
  }
  return "?";
}

std::optional<Bell> bell_from_string(std::string_view name) {
  for (Bell b : kAllBell)
    if (to_string(b) == name) return b;
  return std::nullopt;
}

bool SpinOperator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() < tol;
}

bool SpinOperator::is_unitary(double tol) const {
  return (m_ * m_.adjoint() - Matrix4c::Identity()).cwiseAbs().maxCoeff() < tol;
}

SpinState::SpinState(const Vector4c& amplitudes) : amp_(amplitudes) {
  const double n2 = amp_.squaredNorm();
  if (!(std::abs(n2 - 1.0) <= kNormTolerance)) {
    std::ostringstream msg;
    msg << "SpinState: norm^2 = " << n2 << " is not 1";
    throw std::invalid_argument(msg.str());
  }
}

SpinState SpinState::normalized(const Vector4c& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("SpinState: zero vector");
  return SpinState(v / n);
}

SpinState SpinState::basis(int index) {
  if (index < 0 || index > 3) throw std::out_of_range("SpinState::basis index");
  Vector4c v = Vector4c::Zero();
  v(index) = 1.0;
  return SpinState(v);
}

SpinOperator identity_spin() { return SpinOperator(Matrix4c::Identity()); }

SpinOperator pauli(Axis axis, Particle particle) {
  const Matrix2c p = single_pauli(axis);
  const Matrix2c id = Matrix2c::Identity();
  return SpinOperator(particle == Particle::a ? kron(p, id) : kron(id, p));
}

std::array<SpinState, 4> bell_basis() {
  const double s = 1.0 / std::numbers::sqrt2;
  Vector4c psi_m, phi_m, psi_p, phi_p;
  psi_m << 0, s, -s, 0;
  phi_m << s, 0, 0, -s;
  psi_p << 0, s, s, 0;
  phi_p << s, 0, 0, s;
  return {SpinState(psi_m), SpinState(phi_m), SpinState(psi_p), SpinState(phi_p)};
}

const SpinState& bell_state(Bell b) {
  static const std::array<SpinState, 4> basis = bell_basis();
  return basis[static_cast<int>(b)];
}

SpinOperator interaction_operator(double jx, double jy, double jz, double jpar) {
  const Matrix4c m = jz * (pauli(Axis::z, Particle::a) * pauli(Axis::z, Particle::b)).matrix() +
                     jx * (pauli(Axis::x, Particle::a) * pauli(Axis::x, Particle::b)).matrix() +
                     jy * (pauli(Axis::y, Particle::a) * pauli(Axis::y, Particle::b)).matrix() +
                     jpar * (pauli(Axis::z, Particle::a) + pauli(Axis::z, Particle::b)).matrix();
  return SpinOperator(m);
}

double bell_eigenvalue(Bell b, double jx, double jy, double jz) {
  switch (b) {
    case Bell::psi_minus: return -jx - jy - jz;
    case Bell::phi_minus: return -jx + jy + jz;
    case Bell::psi_plus: return jx + jy - jz;
    case Bell::phi_plus: return jx - jy + jz;
  }
  return 0.0;
}

std::optional<BellRay> classify_bell(const SpinState& psi, double tol) {
  for (Bell b : kAllBell) {
    const cplx c = bell_state(b).inner(psi);
    if (std::norm(c) > 1.0 - tol) return BellRay{b, c / std::abs(c)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double tail_population(const Eigen::VectorXcd& amplitudes) {
  const Eigen::Index n = amplitudes.size();
  const Eigen::Index k = std::min<Eigen::Index>(4, n);
  return amplitudes.tail(k).squaredNorm();
}

void check_tail(const Eigen::VectorXcd& amplitudes, double tail_tol) {
  const double tail = tail_population(amplitudes);
  if (!(tail < tail_tol)) {
    std::ostringstream msg;
    msg << "Fock truncation: tail population " << tail << " >= " << tail_tol << " at dimension "
        << amplitudes.size();
    throw TruncationError(msg.str());
  }
}

MotionState::MotionState(Eigen::VectorXcd amplitudes, MotionFrame frame, double tail_tol)
    : amp_(std::move(amplitudes)), frame_(frame) {
  if (amp_.size() < 2) throw std::invalid_argument("MotionState: dimension must be >= 2");
  if (!(frame_.zpm_um > 0.0)) throw std::invalid_argument("MotionState: zpm must be positive");
  const double n2 = amp_.squaredNorm();
  if (!(std::abs(n2 - 1.0) <= kNormTolerance)) {
    std::ostringstream msg;
    msg << "MotionState: norm^2 = " << n2 << " is not 1";
    throw std::invalid_argument(msg.str());
  }
  check_tail(amp_, tail_tol);
}

MotionState MotionState::ground(int dim, MotionFrame frame) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0;
  return MotionState(std::move(v), frame);
}

double MotionState::mean_occupation() const {
  double n = 0.0;
  for (Eigen::Index k = 0; k < amp_.size(); ++k) n += static_cast<double>(k) * std::norm(amp_(k));
  return n;
}

double MotionState::mean_position() const {
  cplx a_mean = 0.0;
  for (Eigen::Index k = 1; k < amp_.size(); ++k)
    a_mean += std::conj(amp_(k - 1)) * std::sqrt(static_cast<double>(k)) * amp_(k);
  return 2.0 * frame_.zpm_um * a_mean.real();
}

double MotionState::position_variance() const {
  cplx a2 = 0.0;
  for (Eigen::Index k = 2; k < amp_.size(); ++k)
    a2 += std::conj(amp_(k - 2)) * std::sqrt(static_cast<double>(k) * (k - 1)) * amp_(k);
  const double x2 = frame_.zpm_um * frame_.zpm_um * (2.0 * a2.real() + 2.0 * mean_occupation() + 1.0);
  const double x = mean_position();
  return std::max(0.0, x2 - x * x);
}

LadderPair ladder(int dim) {
  if (dim < 2) throw std::invalid_argument("ladder: Fock dimension must be >= 2");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd ad = a.adjoint();
  return {MotionOperator{std::move(a)}, MotionOperator{std::move(ad)}};
}

void hermite_functions(double x_um, double zpm_um, std::span<double> out) {
  if (out.empty()) return;
  const double scale = std::numbers::sqrt2 * zpm_um;
  const double xi = x_um / scale;
  const double norm = 1.0 / std::sqrt(scale);
  // Normalized recurrence; never forms raw Hermite polynomials.
  out[0] = norm * std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  if (out.size() > 1) out[1] = std::numbers::sqrt2 * xi * out[0];
  for (std::size_t n = 2; n < out.size(); ++n) {
    const double nd = static_cast<double>(n);
    out[n] = std::sqrt(2.0 / nd) * xi * out[n - 1] - std::sqrt((nd - 1.0) / nd) * out[n - 2];
  }
}

Eigen::VectorXd hermite_functions(double x_um, double zpm_um, int dim) {
  Eigen::VectorXd v(dim);
  hermite_functions(x_um, zpm_um, std::span<double>(v.data(), static_cast<std::size_t>(dim)));
  return v;
}

double position_density(const MotionState& phi, double R_um, double tail_tol) {
  if (!std::isfinite(R_um)) throw std::invalid_argument("position_density: R must be finite");
  check_tail(phi.amplitudes(), tail_tol);
  const Eigen::VectorXd chi =
      hermite_functions(R_um - phi.frame().origin_um, phi.frame().zpm_um, phi.dim());
  const cplx amp = chi.cast<cplx>().dot(phi.amplitudes());  // chi is real
  return std::norm(amp);
}

MotionState displaced_ground_state(double R_target_um, MotionFrame frame, int dim, double tail_tol) {
  if (dim < 2) throw std::invalid_argument("displaced_ground_state: dimension must be >= 2");
  const double alpha = (R_target_um - frame.origin_um) / (2.0 * frame.zpm_um);
  Eigen::VectorXcd v(dim);
  v(0) = std::exp(-0.5 * alpha * alpha);
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  check_tail(v, tail_tol);
  v /= v.norm();
  return MotionState(std::move(v), frame, tail_tol);
}

MotionState gaussian_wavepacket(double width_um, MotionFrame frame, int dim, double tail_tol) {
  if (!(width_um > 0.0)) throw std::invalid_argument("gaussian_wavepacket: width must be positive");
  const double r = std::log(frame.zpm_um / width_um);
  const double t = -std::tanh(r);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int m = 1; 2 * m < dim; ++m) {
    const double k = 2.0 * m;
    v(2 * m) = v(2 * m - 2) * t * std::sqrt(k * (k - 1.0)) / k;
  }
  check_tail(v, tail_tol);
  v /= v.norm();
  return MotionState(std::move(v), frame, tail_tol);
}

}  // namespace qubot
