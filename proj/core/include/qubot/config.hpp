#pragma once

// Run configuration: named presets, JSON documents layered on top of them,
// and conversion into the physics parameter structs.
//
// Frequencies in config documents are cyclic (Hz); they are converted to
// angular units here.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubot/ensemble.hpp"
#include "qubot/mcwf.hpp"
#include "qubot/potentials.hpp"

namespace qubot {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KappaReading { caption_angular, caption_cyclic, explicit_value };
enum class ModelSource { harmonic, landscape };

struct DressingConfig {
  int n = 60;
  double omega_plus_hz = 9e6;
  double omega_minus_hz = 3e6;
  double delta_plus_hz = -50e6;
  double delta_minus_hz = 50e6;
  std::array<double, 3> c6_mhz_um6 = {-2.7e5, 1.1e3, 4.9e4};
  std::string vaa_first_term_branch = "opposite";
  int pair_coupling_sign = -1;
};

struct TrapConfig {
  std::string kind = "double";
  double v0_rad_per_s_per_um2 = 15e3;
  double delta1_um = 1.6;
  double delta2_um = 2.0;
};

struct GridConfig {
  double r_min_um = 0.2;
  double r_max_um = 6.0;
  int points = 2000;
};

struct SweepConfig {
  std::vector<double> positions_um = {0.30, 0.35, 0.47, 0.52, 0.58, 0.63, 0.69, 0.74, 0.80};
  std::vector<double> nbar_values = {0.0, 0.1, 0.3, 1.0};
  int trajectories_per_point = 100;
  std::vector<double> calibration_widths_um = {0.006, 0.007, 0.008, 0.009, 0.010, 0.012};
  double calibration_target = 0.70;
};

struct RunConfig {
  std::string preset = "paper_main";

  // dynamics
  double gamma_rate_per_s = 100.0;
  double trap_frequency_hz = 1000.0;
  KappaReading kappa_reading = KappaReading::caption_angular;
  double kappa_per_s = 0.0;  // used with KappaReading::explicit_value
  double dt_s = 5e-6;
  double t_final_s = 20e-3;
  double corrector_L1_um = 0.63;
  double corrector_L2_um = -0.63;
  double corrector_width_um = 0.010;
  double trap_center_phi_plus_um = 0.0;
  double trap_center_phi_minus_um = 0.30;
  double trap_center_psi_um = -0.26;
  double frame_origin_um = 1.90;
  double zero_point_motion_um = 0.23;
  double wavepacket_width_um = 0.22;
  int fock_dim = 32;
  double tail_tol = 1e-6;
  double nbar = 0.0;
  bool correctors_enabled = true;
  int record_stride = 20;
  ModelSource model_source = ModelSource::harmonic;

  // ensemble
  std::uint64_t seed = 20240611;
  int trajectories = 1000;
  int workers = 0;
  double steady_state_start_s = 10e-3;

  // potentials
  DressingConfig dressing{};
  TrapConfig trap{};
  GridConfig grid{};
  std::array<double, 2> parallel_average_range_um = {0.2, 6.0};
  double tau_r_s = 133e-6;

  SweepConfig sweep{};
  std::string out_dir = "out";

  // Throws ConfigError with a field-level message.
  void validate() const;

  double kappa() const;
  DressingParams dressing_params() const;
  TrapSpec trap_spec() const;
  Eigen::VectorXd grid_points() const;
  // Builds the dynamics parameters; with ModelSource::landscape the trap
  // centres come from the landscape minima.
  SimParams sim_params() const;
  RunOptions run_options() const;
};

std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

// Layers a JSON document over a preset. The preset is `preset_override` if
// given, else the document's "preset" key, else paper_main. Unknown keys and
// type mismatches throw ConfigError.
RunConfig config_from_json(const std::string& text,
                           const std::optional<std::string>& preset_override = std::nullopt);
RunConfig load_config_file(const std::string& path,
                           const std::optional<std::string>& preset_override = std::nullopt);

// Full document; config_from_json(config_to_json(c)) reproduces c.
std::string config_to_json(const RunConfig& c, int indent = 2);

std::string to_string(KappaReading k);
std::string to_string(ModelSource m);

}  // namespace qubot
