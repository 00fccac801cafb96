#pragma once

// Dense linear algebra for the two-spin nucleus (4 dimensions) and the
// truncated Fock space of the mobile atom's motion.
//
// Units: hbar = 1, energies and rates in rad/s, lengths in micrometres.

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qubot {

using cplx = std::complex<double>;
using Vector4c = Eigen::Matrix<cplx, 4, 1>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kDefaultTailTolerance = 1e-6;

// Raised when a motion state leaks population into the last Fock levels.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { x, y, z };
enum class Particle { a, b };

// Bell labels in the order used throughout the project.
enum class Bell { psi_minus = 0, phi_minus = 1, psi_plus = 2, phi_plus = 3 };
inline constexpr std::array<Bell, 4> kAllBell = {Bell::psi_minus, Bell::phi_minus,
                                                 Bell::psi_plus, Bell::phi_plus};

std::string_view to_string(Bell b);
std::optional<Bell> bell_from_string(std::string_view name);

class SpinOperator {
 public:
  SpinOperator() : m_(Matrix4c::Zero()) {}
  explicit SpinOperator(const Matrix4c& m) : m_(m) {}

  const Matrix4c& matrix() const { return m_; }
  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-12) const;

  friend SpinOperator operator*(const SpinOperator& l, const SpinOperator& r) {
    return SpinOperator(l.m_ * r.m_);
  }
  friend SpinOperator operator+(const SpinOperator& l, const SpinOperator& r) {
    return SpinOperator(l.m_ + r.m_);
  }
  friend SpinOperator operator*(cplx s, const SpinOperator& op) { return SpinOperator(s * op.m_); }

 private:
  Matrix4c m_;
};

// Normalized state of the two nucleus spins over |00>,|01>,|10>,|11>.
class SpinState {
 public:
  // Throws std::invalid_argument unless the vector has unit norm to kNormTolerance.
  explicit SpinState(const Vector4c& amplitudes);
  // Rescales a non-zero vector to unit norm.
  static SpinState normalized(const Vector4c& v);
  static SpinState basis(int index);

  const Vector4c& amplitudes() const { return amp_; }
  cplx inner(const SpinState& other) const { return amp_.dot(other.amp_); }
  double overlap(const SpinState& other) const { return std::norm(inner(other)); }
  // op|psi>, not renormalized.
  Vector4c apply(const SpinOperator& op) const { return op.matrix() * amp_; }

 private:
  Vector4c amp_;
};

SpinOperator identity_spin();
SpinOperator pauli(Axis axis, Particle particle);

// |psi+->=(|01>+-|10>)/sqrt2, |phi+->=(|00>+-|11>)/sqrt2, in kAllBell order.
std::array<SpinState, 4> bell_basis();
const SpinState& bell_state(Bell b);

// J_z Z_aZ_b + J_x X_aX_b + J_y Y_aY_b + J_par (Z_a + Z_b).
SpinOperator interaction_operator(double jx, double jy, double jz, double jpar = 0.0);

// Closed-form eigenvalue of the XYZ interaction (J_par = 0) on a Bell state.
double bell_eigenvalue(Bell b, double jx, double jy, double jz);

struct BellRay {
  Bell label;
  cplx phase;  // psi = phase * |label>
};
// Identifies psi as a Bell basis element up to a unit phase, if it is one within tol.
std::optional<BellRay> classify_bell(const SpinState& psi, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Motion

// Position frame of the oscillator: x = R - origin_um = zpm_um * (a + a^dag).
struct MotionFrame {
  double origin_um = 0.0;
  double zpm_um = 0.23;
};

class MotionState {
 public:
  // Validates unit norm and the truncation tail sum_{n >= N-4} |a_n|^2 < tail_tol.
  MotionState(Eigen::VectorXcd amplitudes, MotionFrame frame,
              double tail_tol = kDefaultTailTolerance);
  static MotionState ground(int dim, MotionFrame frame);

  int dim() const { return static_cast<int>(amp_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  const MotionFrame& frame() const { return frame_; }

  double mean_occupation() const;
  // Frame-relative position moments (micrometres).
  double mean_position() const;
  double position_variance() const;

 private:
  Eigen::VectorXcd amp_;
  MotionFrame frame_;
};

// Population in the last four Fock levels.
double tail_population(const Eigen::VectorXcd& amplitudes);
void check_tail(const Eigen::VectorXcd& amplitudes, double tail_tol);

struct MotionOperator {
  Eigen::MatrixXcd matrix;
};

struct LadderPair {
  MotionOperator a;
  MotionOperator a_dag;
};

// <m|a|n> = sqrt(n) delta_{m,n-1}. Throws std::invalid_argument for dim < 2.
LadderPair ladder(int dim);

// Real orthonormal oscillator eigenfunctions chi_n(x), n < dim, for a ground
// state of position spread zpm_um. Normalized so that sum |c_n chi_n(x)|^2
// integrates to one over x in micrometres.
void hermite_functions(double x_um, double zpm_um, std::span<double> out);
Eigen::VectorXd hermite_functions(double x_um, double zpm_um, int dim);

// |<R|phi>|^2 in 1/um. Throws TruncationError on a tail violation.
double position_density(const MotionState& phi, double R_um,
                        double tail_tol = kDefaultTailTolerance);

// Coherent state centred at R_target with width zpm (alpha = dx / (2 zpm)).
MotionState displaced_ground_state(double R_target_um, MotionFrame frame, int dim,
                                   double tail_tol = kDefaultTailTolerance);

// Minimum-uncertainty Gaussian at the frame origin with position spread
// width_um. Squeezed vacuum when width_um != zpm.
MotionState gaussian_wavepacket(double width_um, MotionFrame frame, int dim,
                                double tail_tol = kDefaultTailTolerance);

}  // namespace qubot
