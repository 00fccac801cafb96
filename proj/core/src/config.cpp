#include "qubot/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qubot {

using json = nlohmann::ordered_json;

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<KappaReading> kKappaNames[] = {{KappaReading::caption_angular, "caption_angular"},
                                                  {KappaReading::caption_cyclic, "caption_cyclic"},
                                                  {KappaReading::explicit_value, "explicit"}};
constexpr EnumName<ModelSource> kSourceNames[] = {{ModelSource::harmonic, "harmonic"},
                                                  {ModelSource::landscape, "landscape"}};

template <class E, std::size_t N>
E parse_enum(const EnumName<E> (&names)[N], const std::string& s, const char* field) {
  for (const auto& n : names)
    if (s == n.name) return n.value;
  std::string allowed;
  for (const auto& n : names) allowed += std::string(allowed.empty() ? "" : ", ") + n.name;
  throw ConfigError(std::string(field) + ": unknown value '" + s + "' (expected one of " + allowed + ")");
}

template <class E, std::size_t N>
std::string enum_name(const EnumName<E> (&names)[N], E v) {
  for (const auto& n : names)
    if (n.value == v) return n.name;
  return "?";
}

json to_tree(const RunConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["gamma_rate_per_s"] = c.gamma_rate_per_s;
  j["trap_frequency_hz"] = c.trap_frequency_hz;
  j["kappa_reading"] = to_string(c.kappa_reading);
  j["kappa_per_s"] = c.kappa_per_s;
  j["dt_s"] = c.dt_s;
  j["t_final_s"] = c.t_final_s;
  j["corrector_L1_um"] = c.corrector_L1_um;
  j["corrector_L2_um"] = c.corrector_L2_um;
  j["corrector_width_um"] = c.corrector_width_um;
  j["trap_center_phi_plus_um"] = c.trap_center_phi_plus_um;
  j["trap_center_phi_minus_um"] = c.trap_center_phi_minus_um;
  j["trap_center_psi_um"] = c.trap_center_psi_um;
  j["frame_origin_um"] = c.frame_origin_um;
  j["zero_point_motion_um"] = c.zero_point_motion_um;
  j["wavepacket_width_um"] = c.wavepacket_width_um;
  j["fock_dim"] = c.fock_dim;
  j["tail_tol"] = c.tail_tol;
  j["nbar"] = c.nbar;
  j["correctors_enabled"] = c.correctors_enabled;
  j["record_stride"] = c.record_stride;
  j["model_source"] = to_string(c.model_source);
  j["seed"] = c.seed;
  j["trajectories"] = c.trajectories;
  j["workers"] = c.workers;
  j["steady_state_start_s"] = c.steady_state_start_s;
  j["dressing"] = {{"n", c.dressing.n},
                   {"omega_plus_hz", c.dressing.omega_plus_hz},
                   {"omega_minus_hz", c.dressing.omega_minus_hz},
                   {"delta_plus_hz", c.dressing.delta_plus_hz},
                   {"delta_minus_hz", c.dressing.delta_minus_hz},
                   {"c6_mhz_um6", c.dressing.c6_mhz_um6},
                   {"vaa_first_term_branch", c.dressing.vaa_first_term_branch},
                   {"pair_coupling_sign", c.dressing.pair_coupling_sign}};
  j["trap"] = {{"kind", c.trap.kind},
               {"v0_rad_per_s_per_um2", c.trap.v0_rad_per_s_per_um2},
               {"delta1_um", c.trap.delta1_um},
               {"delta2_um", c.trap.delta2_um}};
  j["grid"] = {{"r_min_um", c.grid.r_min_um}, {"r_max_um", c.grid.r_max_um}, {"points", c.grid.points}};
  j["parallel_average_range_um"] = c.parallel_average_range_um;
  j["tau_r_s"] = c.tau_r_s;
  j["sweep"] = {{"positions_um", c.sweep.positions_um},
                {"nbar_values", c.sweep.nbar_values},
                {"trajectories_per_point", c.sweep.trajectories_per_point},
                {"calibration_widths_um", c.sweep.calibration_widths_um},
                {"calibration_target", c.sweep.calibration_target}};
  j["out_dir"] = c.out_dir;
  return j;
}

bool compatible(const json& base, const json& v) {
  if (base.is_boolean()) return v.is_boolean();
  if (base.is_string()) return v.is_string();
  if (base.is_array()) return v.is_array();
  if (base.is_object()) return v.is_object();
  if (base.is_number_integer()) return v.is_number_integer();
  if (base.is_number()) return v.is_number();
  return false;
}

const char* type_word(const json& base) {
  if (base.is_boolean()) return "a boolean";
  if (base.is_string()) return "a string";
  if (base.is_array()) return "an array";
  if (base.is_object()) return "an object";
  if (base.is_number_integer()) return "an integer";
  return "a number";
}

void overlay(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(key + ": unknown key");
    json& slot = base[it.key()];
    if (!compatible(slot, it.value())) throw ConfigError(key + ": must be " + type_word(slot));
    if (slot.is_object())
      overlay(slot, it.value(), key);
    else if (slot.is_array()) {
      for (const auto& e : it.value())
        if (!e.is_number()) throw ConfigError(key + ": entries must be numbers");
      slot = it.value();
    } else
      slot = it.value();
  }
}

template <class T>
T get(const json& j, const char* key) {
  return j.at(key).get<T>();
}

RunConfig from_tree(const json& j) {
  RunConfig c;
  try {
    c.preset = get<std::string>(j, "preset");
    c.gamma_rate_per_s = get<double>(j, "gamma_rate_per_s");
    c.trap_frequency_hz = get<double>(j, "trap_frequency_hz");
    c.kappa_reading = parse_enum(kKappaNames, get<std::string>(j, "kappa_reading"), "kappa_reading");
    c.kappa_per_s = get<double>(j, "kappa_per_s");
    c.dt_s = get<double>(j, "dt_s");
    c.t_final_s = get<double>(j, "t_final_s");
    c.corrector_L1_um = get<double>(j, "corrector_L1_um");
    c.corrector_L2_um = get<double>(j, "corrector_L2_um");
    c.corrector_width_um = get<double>(j, "corrector_width_um");
    c.trap_center_phi_plus_um = get<double>(j, "trap_center_phi_plus_um");
    c.trap_center_phi_minus_um = get<double>(j, "trap_center_phi_minus_um");
    c.trap_center_psi_um = get<double>(j, "trap_center_psi_um");
    c.frame_origin_um = get<double>(j, "frame_origin_um");
    c.zero_point_motion_um = get<double>(j, "zero_point_motion_um");
    c.wavepacket_width_um = get<double>(j, "wavepacket_width_um");
    c.fock_dim = get<int>(j, "fock_dim");
    c.tail_tol = get<double>(j, "tail_tol");
    c.nbar = get<double>(j, "nbar");
    c.correctors_enabled = get<bool>(j, "correctors_enabled");
    c.record_stride = get<int>(j, "record_stride");
    c.model_source = parse_enum(kSourceNames, get<std::string>(j, "model_source"), "model_source");
    if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0)
      throw ConfigError("seed: must be non-negative");
    c.seed = get<std::uint64_t>(j, "seed");
    c.trajectories = get<int>(j, "trajectories");
    c.workers = get<int>(j, "workers");
    c.steady_state_start_s = get<double>(j, "steady_state_start_s");
    const json& d = j.at("dressing");
    c.dressing.n = get<int>(d, "n");
    c.dressing.omega_plus_hz = get<double>(d, "omega_plus_hz");
    c.dressing.omega_minus_hz = get<double>(d, "omega_minus_hz");
    c.dressing.delta_plus_hz = get<double>(d, "delta_plus_hz");
    c.dressing.delta_minus_hz = get<double>(d, "delta_minus_hz");
    const auto c6 = get<std::vector<double>>(d, "c6_mhz_um6");
    if (c6.size() != 3) throw ConfigError("dressing.c6_mhz_um6: expected 3 entries");
    std::copy(c6.begin(), c6.end(), c.dressing.c6_mhz_um6.begin());
    c.dressing.vaa_first_term_branch = get<std::string>(d, "vaa_first_term_branch");
    c.dressing.pair_coupling_sign = get<int>(d, "pair_coupling_sign");
    const json& t = j.at("trap");
    c.trap.kind = get<std::string>(t, "kind");
    c.trap.v0_rad_per_s_per_um2 = get<double>(t, "v0_rad_per_s_per_um2");
    c.trap.delta1_um = get<double>(t, "delta1_um");
    c.trap.delta2_um = get<double>(t, "delta2_um");
    const json& g = j.at("grid");
    c.grid.r_min_um = get<double>(g, "r_min_um");
    c.grid.r_max_um = get<double>(g, "r_max_um");
    c.grid.points = get<int>(g, "points");
    const auto range = get<std::vector<double>>(j, "parallel_average_range_um");
    if (range.size() != 2) throw ConfigError("parallel_average_range_um: expected 2 entries");
    c.parallel_average_range_um = {range[0], range[1]};
    c.tau_r_s = get<double>(j, "tau_r_s");
    const json& s = j.at("sweep");
    c.sweep.positions_um = get<std::vector<double>>(s, "positions_um");
    c.sweep.nbar_values = get<std::vector<double>>(s, "nbar_values");
    c.sweep.trajectories_per_point = get<int>(s, "trajectories_per_point");
    c.sweep.calibration_widths_um = get<std::vector<double>>(s, "calibration_widths_um");
    c.sweep.calibration_target = get<double>(s, "calibration_target");
    c.out_dir = get<std::string>(j, "out_dir");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace

std::string to_string(KappaReading k) { return enum_name(kKappaNames, k); }
std::string to_string(ModelSource m) { return enum_name(kSourceNames, m); }

double RunConfig::kappa() const {
  switch (kappa_reading) {
    case KappaReading::caption_angular: {
      const double w = kTwoPi * trap_frequency_hz;
      return 1e-4 * w * w;
    }
    case KappaReading::caption_cyclic: return 1e-4 * trap_frequency_hz * trap_frequency_hz;
    case KappaReading::explicit_value: return kappa_per_s;
  }
  return 0.0;
}

DressingParams RunConfig::dressing_params() const {
  DressingParams p;
  p.n = dressing.n;
  p.omega_plus = kTwoPi * dressing.omega_plus_hz;
  p.omega_minus = kTwoPi * dressing.omega_minus_hz;
  p.delta_plus = kTwoPi * dressing.delta_plus_hz;
  p.delta_minus = kTwoPi * dressing.delta_minus_hz;
  p.c6a = kTwoPi * 1e6 * dressing.c6_mhz_um6[0];
  p.c6b = kTwoPi * 1e6 * dressing.c6_mhz_um6[1];
  p.c6c = kTwoPi * 1e6 * dressing.c6_mhz_um6[2];
  if (dressing.vaa_first_term_branch == "opposite")
    p.vaa_branch = VaaBranch::opposite;
  else if (dressing.vaa_first_term_branch == "same")
    p.vaa_branch = VaaBranch::same;
  else
    throw ConfigError("dressing.vaa_first_term_branch: expected 'opposite' or 'same'");
  p.pair_coupling_sign = dressing.pair_coupling_sign;
  return p;
}

TrapSpec RunConfig::trap_spec() const {
  TrapSpec t;
  if (trap.kind == "single")
    t.kind = TrapKind::single;
  else if (trap.kind == "double")
    t.kind = TrapKind::dual;
  else
    throw ConfigError("trap.kind: expected 'single' or 'double'");
  t.v0 = trap.v0_rad_per_s_per_um2;
  t.delta1 = trap.delta1_um;
  t.delta2 = trap.delta2_um;
  return t;
}

Eigen::VectorXd RunConfig::grid_points() const {
  try {
    return log_grid(grid.r_min_um, grid.r_max_um, grid.points);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

SimParams RunConfig::sim_params() const {
  SimParams p;
  p.gamma = gamma_rate_per_s;
  p.omega_t = kTwoPi * trap_frequency_hz;
  p.kappa = kappa();
  p.dt = dt_s;
  p.t_final = t_final_s;
  p.R_L1 = corrector_L1_um;
  p.R_L2 = corrector_L2_um;
  p.corrector_width = corrector_width_um;
  p.centers = {trap_center_phi_plus_um, trap_center_phi_minus_um, trap_center_psi_um};
  p.frame_origin = frame_origin_um;
  p.zpm = zero_point_motion_um;
  p.wavepacket_width = wavepacket_width_um;
  p.fock_dim = fock_dim;
  p.tail_tol = tail_tol;
  p.nbar = nbar;
  p.correctors_enabled = correctors_enabled;
  p.record_stride = record_stride;
  if (model_source == ModelSource::landscape) {
    const SpinPattern pat = spin_pattern(grid_points(), dressing_params());
    p.centers = trap_centers_from_landscape(landscape(pat, trap_spec()), &p.frame_origin);
  }
  return p;
}

RunOptions RunConfig::run_options() const {
  return {trajectories, seed, workers, steady_state_start_s};
}

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(trajectories >= 1, "trajectories: must be >= 1");
  need(workers >= 0, "workers: must be >= 0");
  need(trap_frequency_hz > 0.0, "trap_frequency_hz: must be positive");
  need(kappa_reading != KappaReading::explicit_value || kappa_per_s >= 0.0,
       "kappa_per_s: must be >= 0");
  need(steady_state_start_s >= 0.0 && steady_state_start_s <= t_final_s,
       "steady_state_start_s: must lie within [0, t_final_s]");
  need(parallel_average_range_um[1] > parallel_average_range_um[0],
       "parallel_average_range_um: must be increasing");
  need(parallel_average_range_um[0] >= grid.r_min_um && parallel_average_range_um[1] <= grid.r_max_um,
       "parallel_average_range_um: must lie within the grid");
  need(tau_r_s > 0.0, "tau_r_s: must be positive");
  need(!out_dir.empty(), "out_dir: must not be empty");
  for (double x : sweep.positions_um) need(x > 0.0 && std::isfinite(x), "sweep.positions_um: entries must be positive");
  for (double x : sweep.nbar_values) need(x >= 0.0 && std::isfinite(x), "sweep.nbar_values: entries must be >= 0");
  need(sweep.trajectories_per_point >= 1, "sweep.trajectories_per_point: must be >= 1");
  for (double x : sweep.calibration_widths_um)
    need(x > 0.0 && std::isfinite(x), "sweep.calibration_widths_um: entries must be positive");
  need(sweep.calibration_target > 0.0 && sweep.calibration_target <= 1.0,
       "sweep.calibration_target: must be in (0, 1]");
  // Field-level checks of the derived structs.
  auto wrap = [](const char* where, auto&& f) {
    try {
      f();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(where) + ": " + e.what());
    }
  };
  wrap("dressing", [&] { dressing_params().validate(); });
  wrap("trap", [&] { trap_spec().validate(); });
  wrap("grid", [&] { grid_points(); });
  wrap("dynamics", [&] {
    SimParams p = sim_params();
    p.validate();
  });
}

std::vector<std::string> preset_names() { return {"paper_main", "paper_appendix_c", "custom"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "paper_main" || name == "custom") {
    c.preset = name;
    return c;
  }
  if (name == "paper_appendix_c") {
    c.preset = name;
    c.dressing.delta_plus_hz = -70e6;
    c.dressing.delta_minus_hz = 30e6;
    c.dressing.omega_plus_hz = -7e6;
    c.dressing.omega_minus_hz = -7e6;
    c.trap.kind = "single";
    c.trap.delta1_um = 2.30;
    c.trap.delta2_um = 0.0;
    return c;
  }
  throw ConfigError("preset: unknown preset '" + name + "'");
}

RunConfig config_from_json(const std::string& text, const std::optional<std::string>& preset_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  std::string name = "paper_main";
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("preset: must be a string");
    name = doc["preset"].get<std::string>();
  }
  if (preset_override) name = *preset_override;
  json tree = to_tree(preset(name));
  doc.erase("preset");
  overlay(tree, doc, "");
  RunConfig c = from_tree(tree);
  c.validate();
  return c;
}

RunConfig load_config_file(const std::string& path, const std::optional<std::string>& preset_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), preset_override);
}

std::string config_to_json(const RunConfig& c, int indent) { return to_tree(c).dump(indent); }

}  // namespace qubot
