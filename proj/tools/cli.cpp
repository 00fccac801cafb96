#include "cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "checks.hpp"
#include "json.hpp"
#include "qubot/config.hpp"
#include "qubot/ensemble.hpp"
#include "qubot/logical_model.hpp"
#include "qubot/potentials.hpp"

namespace qubot {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> trajectories;
  std::optional<int> workers;
  std::string out_dir;
  bool check = false;
  int dump_trajectories = 0;
  std::string sweep_kind;
  bool json = false;
  bool inject_sign_error = false;
};

// Files are collected here and written in one final phase.
struct Output {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string body) { files.emplace_back(std::move(name), std::move(body)); }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) s_ << (i ? "," : "") << header[i];
    s_ << '\n';
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) s_ << (i ? "," : "") << num(v[i]);
    s_ << '\n';
  }
  std::ostringstream& raw() { return s_; }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

int workers_from_env() {
  const char* v = std::getenv("QUBOT_SIM_WORKERS");
  if (!v || !*v) return -1;
  int w = 0;
  const char* end = v + std::char_traits<char>::length(v);
  const auto [p, ec] = std::from_chars(v, end, w);
  if (ec != std::errc{} || p != end || w < 0)
    throw ConfigError(std::string("QUBOT_SIM_WORKERS: expected a non-negative integer, got '") + v + "'");
  return w;
}

// preset < config file < environment < flags
RunConfig resolve_config(const Options& o) {
  const std::optional<std::string> preset_override =
      o.preset.empty() ? std::nullopt : std::optional<std::string>(o.preset);
  RunConfig c = o.config_path.empty() ? preset(preset_override.value_or("paper_main"))
                                      : load_config_file(o.config_path, preset_override);
  if (const int w = workers_from_env(); w >= 0) c.workers = w;
  if (o.seed) c.seed = *o.seed;
  if (o.trajectories) {
    c.trajectories = *o.trajectories;
    c.sweep.trajectories_per_point = *o.trajectories;
  }
  if (o.workers) c.workers = *o.workers;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  c.validate();
  return c;
}

ojson config_json(const RunConfig& c) { return ojson::parse(config_to_json(c)); }

ojson checks_json(const std::vector<checks::Check>& cs) {
  ojson a = ojson::array();
  for (const auto& c : cs) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

int report_checks(const std::vector<checks::Check>& cs, std::ostream& out) {
  for (const auto& c : cs) out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
  return checks::all_pass(cs) ? kExitOk : kExitCheck;
}

std::string bell_name(Bell b) { return std::string(to_string(b)); }

// ---------------------------------------------------------------------------

int cmd_landscape(const RunConfig& c, const Options& o, Output& files, std::ostream& out) {
  for (const auto& w : c.dressing_params().validate()) out << "warning: " << w << '\n';
  const auto pattern = spin_pattern(c.grid_points(), c.dressing_params());
  const auto land = landscape(pattern, c.trap_spec());
  const auto field =
      parallel_field_report(pattern, c.parallel_average_range_um[0], c.parallel_average_range_um[1]);

  Csv csv({"R_um", "Jx", "Jy", "Jz", "Jpar", "V_psim", "V_phim", "V_psip", "V_phip"});
  for (Eigen::Index i = 0; i < pattern.R.size(); ++i)
    csv.row({pattern.R[i], pattern.jx[i], pattern.jy[i], pattern.jz[i], pattern.jpar[i], land.V[0][i],
             land.V[1][i], land.V[2][i], land.V[3][i]});

  ojson minima = ojson::object();
  for (Bell b : kAllBell) {
    ojson a = ojson::array();
    for (const auto& m : land.minima_of(b))
      a.push_back({{"R_um", m.R},
                   {"V", m.V},
                   {"curvature", m.curvature},
                   {"trap_frequency_hz", m.trap_frequency / kTwoPi}});
    minima[bell_name(b)] = a;
  }
  ojson coincident = ojson::array();
  for (const auto& [l, r] : land.coincident) coincident.push_back({bell_name(l), bell_name(r)});
  ojson spacings = ojson::array();
  for (std::size_t i = 1; i < land.distinct_minima.size(); ++i)
    spacings.push_back(land.distinct_minima[i] - land.distinct_minima[i - 1]);
  ojson prot = nullptr;
  if (const auto s = land.suggested())
    prot = {{"state", bell_name(s->state)},
            {"l1_at_larger_R", s->l1_at_larger_R},
            {"force_z", s->force_z},
            {"force_x", s->force_x},
            {"force_y", s->force_y}};
  const auto dp = c.dressing_params();
  const auto life = dressed_lifetime(dp.delta_plus, dp.omega_minus, c.tau_r_s);

  ojson res = {{"minima", minima},
               {"distinct_minima_um", land.distinct_minima},
               {"minima_spacings_um", spacings},
               {"mean_spacing_um", land.mean_spacing},
               {"dynamic_range", land.dynamic_range},
               {"coincident", coincident},
               {"psi_minus_psi_plus_coincide", land.coincide(Bell::psi_minus, Bell::psi_plus)},
               {"protected_state", prot},
               {"mean_jpar_rad_per_s", field.mean_jpar},
               {"jpar_average_range_um", c.parallel_average_range_um},
               {"compensating_field_gauss", field.field_gauss},
               {"asymptotic_log_slope", asymptotic_log_slope(pattern)},
               {"dressed_lifetime_s", life.tau_s}};
  int code = kExitOk;
  if (o.check) {
    const auto cs = checks::landscape_checks(c.preset, land, field);
    res["checks"] = checks_json(cs);
    code = report_checks(cs, out);
  }
  out << "minima spacing " << land.mean_spacing << " um, <J_par> " << field.mean_jpar << " rad/s, B "
      << field.field_gauss << " G\n";
  files.add("landscape.csv", csv.str());
  files.add("landscape.json", ojson({{"config", config_json(c)}, {"results", res}}).dump(2) + "\n");
  return code;
}

void dump_trajectories(const std::vector<TrajectoryRecord>& recs, int n, Output& files) {
  Csv tr({"trajectory", "t_s", "overlap", "pos_mean_um", "pos_var_um2", "occupation", "gamma_L1",
          "gamma_L2"});
  std::ostringstream ev;
  ev << "trajectory,t_s,kind,spin_before,spin_after,collapse_position_um\n";
  for (int k = 0; k < n && k < static_cast<int>(recs.size()); ++k) {
    const auto& r = recs[k];
    for (std::size_t i = 0; i < r.times.size(); ++i)
      tr.row({double(k), r.times[i], r.overlap[i], r.pos_mean[i], r.pos_var[i], r.occupation[i],
              r.gamma_L1[i], r.gamma_L2[i]});
    for (const auto& e : r.events)
      ev << k << ',' << num(e.time) << ',' << to_string(e.kind) << ',' << to_string(e.spin_before) << ','
         << to_string(e.spin_after) << ',' << num(e.collapse_position) << '\n';
  }
  files.add("trajectories.csv", tr.str());
  files.add("events.csv", ev.str());
}

int cmd_simulate(const RunConfig& c, const Options& o, Output& files, std::ostream& out) {
  const SimParams p = c.sim_params();
  const auto recs = run_ensemble(p, c.trajectories, c.seed, c.workers);
  const auto stats = ensemble_average(recs);
  const auto ref = depolarizing_reference(p.gamma, stats.times);
  const auto s = checks::summarize(stats, p.gamma, c.steady_state_start_s);

  Csv csv({"t_s", "F", "F_stderr", "pos_mean_um", "pos_std_um", "gamma_L1", "gamma_L2", "F_free"});
  for (std::size_t i = 0; i < stats.times.size(); ++i)
    csv.row({stats.times[i], stats.F[i], stats.F_se[i], stats.pos_mean[i], stats.pos_std[i],
             stats.gamma_L1[i], stats.gamma_L2[i], ref[i]});

  ojson res = {{"n_trajectories", stats.n_trajectories},
               {"steady_state_F", s.steady.F},
               {"steady_state_F_std", s.steady.F_std},
               {"steady_state_gamma_L1", s.steady.gamma_L1},
               {"steady_state_gamma_L2", s.steady.gamma_L2},
               {"steady_state_points", s.steady.n_points},
               {"settling_time_s", s.settled ? ojson(s.settling.t_s) : ojson(nullptr)},
               {"settling_predicted_F", s.settled ? ojson(s.settling.predicted_F) : ojson(nullptr)},
               {"rate_pearson", s.has_pearson ? ojson(s.pearson) : ojson(nullptr)},
               {"frame_origin_um", p.frame_origin},
               {"kappa_per_s", p.kappa}};
  int code = kExitOk;
  if (o.check) {
    const auto cs = checks::simulation_checks(stats, s, p.gamma);
    res["checks"] = checks_json(cs);
    code = report_checks(cs, out);
  }
  out << "<F>_s = " << s.steady.F << " over " << stats.n_trajectories << " trajectories\n";
  files.add("ensemble.csv", csv.str());
  files.add("summary.json", ojson({{"config", config_json(c)}, {"results", res}}).dump(2) + "\n");
  if (o.dump_trajectories > 0) dump_trajectories(recs, o.dump_trajectories, files);
  return code;
}

int cmd_sweep(const RunConfig& c, const Options& o, Output& files, std::ostream& out) {
  const bool position = o.sweep_kind == "position";
  const auto kind = position ? SweepKind::corrector_position : SweepKind::temperature_nbar;
  const auto& values = position ? c.sweep.positions_um : c.sweep.nbar_values;
  if (values.empty())
    throw ConfigError(position ? "sweep.positions_um: empty sweep list" : "sweep.nbar_values: empty sweep list");
  RunOptions ro = c.run_options();
  ro.trajectories = c.sweep.trajectories_per_point;
  const auto r = sweep(kind, values, c.sim_params(), ro);

  Csv csv({position ? "R_L1_um" : "nbar", "F_s", "F_s_std", "gamma_L1", "gamma_L1_std", "gamma_L2",
           "gamma_L2_std"});
  ojson pts = ojson::array();
  for (const auto& q : r.points) {
    const auto& s = q.steady;
    csv.row({q.value, s.F, s.F_std, s.gamma_L1, s.gamma_L1_std, s.gamma_L2, s.gamma_L2_std});
    pts.push_back({{"value", q.value},
                   {"F_s", s.F},
                   {"F_s_std", s.F_std},
                   {"gamma_L1", s.gamma_L1},
                   {"gamma_L1_std", s.gamma_L1_std},
                   {"gamma_L2", s.gamma_L2},
                   {"gamma_L2_std", s.gamma_L2_std}});
  }
  ojson res = {{"kind", to_string(kind)}, {"trajectories_per_point", ro.trajectories}, {"points", pts}};
  int code = kExitOk;
  if (o.check) {
    const auto cs = position ? checks::position_sweep_checks(r) : checks::temperature_sweep_checks(r);
    res["checks"] = checks_json(cs);
    code = report_checks(cs, out);
  }
  for (const auto& q : r.points) out << to_string(kind) << ' ' << q.value << ": <F>_s = " << q.steady.F << '\n';
  const std::string stem = std::string("sweep_") + to_string(kind);
  files.add(stem + ".csv", csv.str());
  files.add(stem + ".json", ojson({{"config", config_json(c)}, {"results", res}}).dump(2) + "\n");
  return code;
}

int cmd_calibrate(const RunConfig& c, Output& files, std::ostream& out) {
  if (c.sweep.calibration_widths_um.empty()) throw ConfigError("sweep.calibration_widths_um: empty list");
  const auto r = calibrate_corrector_width(c.sim_params(), c.sweep.calibration_widths_um,
                                           c.sweep.calibration_target, c.run_options());
  Csv csv({"corrector_width_um", "F_s", "F_s_std"});
  ojson pts = ojson::array();
  for (std::size_t i = 0; i < r.widths.size(); ++i) {
    csv.row({r.widths[i], r.steady[i].F, r.steady[i].F_std});
    pts.push_back({{"corrector_width_um", r.widths[i]}, {"F_s", r.steady[i].F}, {"F_s_std", r.steady[i].F_std}});
    out << "width " << r.widths[i] << " um: <F>_s = " << r.steady[i].F << '\n';
  }
  out << "closest to " << r.target << ": " << r.best_width << " um\n";
  ojson res = {{"target", r.target}, {"best_width_um", r.best_width}, {"points", pts}};
  files.add("calibration.csv", csv.str());
  files.add("calibration.json", ojson({{"config", config_json(c)}, {"results", res}}).dump(2) + "\n");
  return kExitOk;
}

std::string sign_bell(int sign, Bell b) {
  return std::string(sign > 0 ? "+" : sign < 0 ? "-" : "?") + bell_name(b);
}

std::string coeff(cplx z) {
  const double re = std::abs(z.real()) < 1e-12 ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < 1e-12 ? 0.0 : z.imag();
  std::ostringstream s;
  s << std::showpos << std::setprecision(3) << re;
  if (im != 0.0) s << im << 'i';
  return s.str();
}

int cmd_logical_check(const Options& o, std::ostream& out) {
  using namespace logical;
  auto rows = table1_rows();
  if (o.inject_sign_error) rows.front().expected[0].first *= -1;
  const auto table = table1_verify(rows);
  std::vector<EquilibriumResult> eq;
  for (Bell b : kAllBell) eq.push_back(solve_equilibria(reference_dipolar_params(), b));
  const auto cs = checks::logical_checks(table, eq);

  if (o.json) {
    ojson cells = ojson::array(), corr = ojson::array(), roots = ojson::array();
    for (const auto& c : table.cells)
      cells.push_back({{"error", c.error},
                       {"column", bell_name(c.column)},
                       {"expected", sign_bell(c.expected_sign, c.expected_bell)},
                       {"computed", sign_bell(c.computed_sign, c.computed_bell)},
                       {"pass", c.pass}});
    for (const auto& c : table.corrected)
      corr.push_back({{"error", c.error},
                      {"expected", c.expected},
                      {"computed_alpha", {c.computed[0].real(), c.computed[0].imag()}},
                      {"computed_beta", {c.computed[1].real(), c.computed[1].imag()}},
                      {"pass", c.pass}});
    for (const auto& e : eq) {
      ojson rs = ojson::array();
      for (const auto& r : e.roots) rs.push_back({{"R", r.R}, {"minimum", r.is_minimum}, {"residual", r.residual}});
      roots.push_back({{"state", bell_name(e.bell)}, {"w", e.w}, {"rhs", e.rhs}, {"roots", rs}});
    }
    out << ojson({{"table", cells}, {"corrected", corr}, {"equilibria", roots}, {"checks", checks_json(cs)}})
               .dump(2)
        << '\n';
    return checks::all_pass(cs) ? kExitOk : kExitCheck;
  }

  out << std::left << std::setw(8) << "error" << std::setw(14) << "column" << std::setw(12) << "expected"
      << std::setw(12) << "computed" << "ok\n";
  for (const auto& c : table.cells)
    out << std::setw(8) << c.error << std::setw(14) << bell_name(c.column) << std::setw(12)
        << sign_bell(c.expected_sign, c.expected_bell) << std::setw(12)
        << sign_bell(c.computed_sign, c.computed_bell) << (c.pass ? "yes" : "NO") << '\n';
  out << '\n' << std::setw(8) << "error" << std::setw(18) << "expected" << std::setw(22) << "computed" << "ok\n";
  for (const auto& c : table.corrected) {
    const std::string e = (c.expected[0] > 0 ? "+a " : "-a ") + std::string(c.expected[1] > 0 ? "+b" : "-b");
    out << std::setw(8) << c.error << std::setw(18) << e << std::setw(22)
        << (coeff(c.computed[0]) + "a " + coeff(c.computed[1]) + "b") << (c.pass ? "yes" : "NO") << '\n';
  }
  out << "\nequilibria (jx=1, jy=-3, jz=6)\n";
  for (const auto& e : eq) {
    out << std::setw(12) << bell_name(e.bell) << "<W> = " << std::setw(6) << e.w;
    if (e.roots.empty()) out << " no real root";
    for (const auto& r : e.roots)
      out << "  R = " << std::setprecision(6) << r.R << (r.is_minimum ? " (min)" : " (max)");
    out << (e.has_minimum() ? "" : "  [no minimum]") << '\n';
  }
  out << std::right << '\n';
  return report_checks(cs, out);
}

void write_files(const std::string& dir, const Output& files) {
  fs::create_directories(dir);
  for (const auto& [name, body] : files.files) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << body;
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
  }
}

void add_run_options(CLI::App* sub, Options& o, bool with_dump) {
  sub->add_option("--config", o.config_path, "JSON config file layered over the preset");
  sub->add_option("--preset", o.preset, "named preset")
      ->check(CLI::IsMember(preset_names()));
  sub->add_option("--seed", o.seed, "ensemble seed");
  sub->add_option("--trajectories", o.trajectories, "trajectories (per point for sweeps)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--workers", o.workers, "worker threads, 0 = all cores (env QUBOT_SIM_WORKERS)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--out", o.out_dir, "output directory");
  if (with_dump) {
    sub->add_option("--dump-trajectories", o.dump_trajectories,
                    "also write per-trajectory records of the first N trajectories")
        ->check(CLI::NonNegativeNumber);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qubot: dressed-Rydberg qubot potentials, logical algebra and spin-motion dynamics"};
  app.require_subcommand(1);
  Options o;

  auto* land = app.add_subcommand("landscape", "spin pattern and Bell-state landscapes");
  add_run_options(land, o, false);
  land->add_flag("--check", o.check, "assert the landscape targets");

  auto* sim = app.add_subcommand("simulate", "SMMC ensemble");
  add_run_options(sim, o, true);
  sim->add_flag("--check", o.check, "assert the ensemble targets");

  auto* swp = app.add_subcommand("sweep", "corrector-position or temperature sweep");
  swp->add_option("kind", o.sweep_kind, "position | temperature")
      ->required()
      ->check(CLI::IsMember({"position", "temperature"}));
  add_run_options(swp, o, false);
  swp->add_flag("--check", o.check, "assert the sweep trends");

  auto* cal = app.add_subcommand("calibrate", "grid the corrector width against the target overlap");
  add_run_options(cal, o, false);

  auto* lc = app.add_subcommand("logical-check", "verify the error/correction table and equilibria");
  lc->add_flag("--json", o.json, "print JSON instead of text");
  lc->add_flag("--inject-sign-error", o.inject_sign_error)->group("");
  lc->add_flag("--check", o.check, "accepted for symmetry; the check always runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (lc->parsed()) return cmd_logical_check(o, out);

    const RunConfig c = resolve_config(o);
    Output files;
    int code = kExitOk;
    if (land->parsed()) code = cmd_landscape(c, o, files, out);
    else if (sim->parsed()) code = cmd_simulate(c, o, files, out);
    else if (swp->parsed()) code = cmd_sweep(c, o, files, out);
    else code = cmd_calibrate(c, files, out);
    write_files(c.out_dir, files);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace qubot
