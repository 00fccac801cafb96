#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "qubot/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qubot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qubot::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("qubot_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

// a short run to keep the tests fast
const char* kShort = R"({"t_final_s": 0.004, "steady_state_start_s": 0.002, "trajectories": 12})";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 1);
  CHECK(run({"simulate", "--bogus"}).code == 1);
  CHECK(run({"simulate", "--preset", "unknown"}).code == 1);
  CHECK(run({"sweep", "sideways"}).code == 1);
}

TEST_CASE("logical-check") {
  const auto r = run({"logical-check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
  CHECK(r.out.find("psi_plus") != std::string::npos);
  CHECK(r.out.find("no minimum") != std::string::npos);

  const auto j = json::parse(run({"logical-check", "--json"}).out);
  CHECK(j["table"].size() == 12);
  CHECK(j["corrected"].size() == 6);
  for (const auto& c : j["checks"]) CHECK(c["pass"].get<bool>());

  CHECK(run({"logical-check", "--inject-sign-error"}).code == 3);
}

TEST_CASE("landscape outputs") {
  TempDir d;
  const auto r = run({"landscape", "--out", d / "main"});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(d / "main/landscape.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "R_um,Jx,Jy,Jz,Jpar,V_psim,V_phim,V_psip,V_phip");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2001);
  const auto j = json::parse(slurp(d / "main/landscape.json"));
  CHECK(std::abs(j["results"]["mean_spacing_um"].get<double>() - 0.3) < 0.1);
  CHECK(j["results"]["psi_minus_psi_plus_coincide"].get<bool>());
  CHECK(j["results"]["protected_state"]["state"] == "phi_plus");
  // the sidecar's config is a valid config document
  CHECK_NOTHROW(qubot::config_from_json(j["config"].dump()));

  REQUIRE(run({"landscape", "--preset", "paper_appendix_c", "--out", d / "c"}).code == 0);
  const auto jc = json::parse(slurp(d / "c/landscape.json"));
  CHECK(jc["results"]["protected_state"]["state"] == "phi_minus");

  // --check exits 3 exactly when a check fails
  const auto chk = run({"landscape", "--check", "--out", d / "chk"});
  const auto jk = json::parse(slurp(d / "chk/landscape.json"));
  bool all = true;
  for (const auto& c : jk["results"]["checks"]) all = all && c["pass"].get<bool>();
  CHECK(chk.code == (all ? 0 : 3));
}

TEST_CASE("config errors write nothing") {
  TempDir d;
  write(d / "malformed.json", R"({"trajectories": 3)");
  write(d / "unknown.json", R"({"trajectory": 3})");
  write(d / "invalid.json", R"({"dressing": {"omega_plus_hz": 4e7}})");
  write(d / "empty_sweep.json", R"({"sweep": {"positions_um": []}})");
  for (const char* f : {"malformed.json", "unknown.json", "invalid.json"}) {
    const auto r = run({"landscape", "--config", d / f, "--out", d / "out"});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(d / "out"));
  }
  CHECK(run({"sweep", "position", "--config", d / "empty_sweep.json", "--out", d / "out"}).code == 1);
  CHECK(run({"simulate", "--config", d / "missing.json", "--out", d / "out"}).code == 1);
  CHECK_FALSE(fs::exists(d / "out"));
}

TEST_CASE("runtime violations exit 2 without output") {
  TempDir d;
  // a wide squeezed packet does not fit into 8 Fock levels
  write(d / "trunc.json", R"({"fock_dim": 8, "wavepacket_width_um": 0.9, "trajectories": 2})");
  const auto r = run({"simulate", "--config", d / "trunc.json", "--out", d / "out"});
  CHECK(r.code == 2);
  CHECK(r.err.find("runcation") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "out"));
}

TEST_CASE("simulate is byte-identical across worker counts") {
  TempDir d;
  write(d / "short.json", kShort);
  const auto a = run({"simulate", "--config", d / "short.json", "--workers", "1", "--dump-trajectories", "3", "--out", d / "a"});
  const auto b = run({"simulate", "--config", d / "short.json", "--workers", "4", "--dump-trajectories", "3", "--out", d / "b"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* f : {"ensemble.csv", "trajectories.csv", "events.csv"}) {
    CHECK_MESSAGE(slurp(d / (std::string("a/") + f)) == slurp(d / (std::string("b/") + f)), f);
  }
  const std::string csv = slurp(d / "a/ensemble.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "t_s,F,F_stderr,pos_mean_um,pos_std_um,gamma_L1,gamma_L2,F_free");
  CHECK(csv.find("1.0000000000000000e-04") != std::string::npos);  // 17 significant digits

  const auto c = run({"simulate", "--config", d / "short.json", "--seed", "8", "--out", d / "c"});
  REQUIRE(c.code == 0);
  CHECK(slurp(d / "c/ensemble.csv") != csv);
}

TEST_CASE("summary json round-trips through the config loader") {
  TempDir d;
  write(d / "short.json", kShort);
  REQUIRE(run({"simulate", "--config", d / "short.json", "--seed", "77", "--out", d / "s"}).code == 0);
  const auto j = json::parse(slurp(d / "s/summary.json"));
  CHECK(j["config"]["seed"] == 77);
  CHECK(j["results"]["n_trajectories"] == 12);
  const auto c = qubot::config_from_json(j["config"].dump());
  CHECK(json::parse(qubot::config_to_json(c)) == j["config"]);
}

TEST_CASE("without depolarization the overlap stays one") {
  TempDir d;
  write(d / "g0.json", R"({"gamma_rate_per_s": 0, "correctors_enabled": false, "t_final_s": 0.004,
                            "steady_state_start_s": 0.002, "trajectories": 5})");
  REQUIRE(run({"simulate", "--config", d / "g0.json", "--out", d / "g"}).code == 0);
  std::istringstream csv(slurp(d / "g/ensemble.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    CHECK(std::abs(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) - 1.0) < 1e-12);
    ++rows;
  }
  CHECK(rows == 41);
}

TEST_CASE("worker count precedence: flag > environment > config") {
  TempDir d;
  write(d / "w.json", R"({"t_final_s": 0.001, "steady_state_start_s": 0.0005, "trajectories": 2, "workers": 5})");
  auto workers = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = {"simulate", "--config", d / "w.json", "--out", d / "w"};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(run(args).code == 0);
    return json::parse(slurp(d / "w/summary.json"))["config"]["workers"].get<int>();
  };
  ::unsetenv("QUBOT_SIM_WORKERS");
  CHECK(workers({}) == 5);
  ::setenv("QUBOT_SIM_WORKERS", "2", 1);
  CHECK(workers({}) == 2);
  CHECK(workers({"--workers", "3"}) == 3);
  ::setenv("QUBOT_SIM_WORKERS", "two", 1);
  CHECK(run({"simulate", "--config", d / "w.json", "--out", d / "w2"}).code == 1);
  ::unsetenv("QUBOT_SIM_WORKERS");
}

TEST_CASE("sweeps") {
  TempDir d;
  write(d / "sw.json", R"({"t_final_s": 0.003, "steady_state_start_s": 0.001,
                            "sweep": {"nbar_values": [0.0, 0.5], "positions_um": [0.52, 0.63, 0.74],
                                      "trajectories_per_point": 3}})");
  REQUIRE(run({"sweep", "temperature", "--config", d / "sw.json", "--out", d / "t"}).code == 0);
  const std::string csv = slurp(d / "t/sweep_temperature.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.substr(0, csv.find('\n')) == "nbar,F_s,F_s_std,gamma_L1,gamma_L1_std,gamma_L2,gamma_L2_std");
  const auto j = json::parse(slurp(d / "t/sweep_temperature.json"));
  CHECK(j["results"]["trajectories_per_point"] == 3);
  CHECK(j["results"]["points"].size() == 2);

  REQUIRE(run({"sweep", "position", "--config", d / "sw.json", "--trajectories", "2", "--out", d / "p"}).code == 0);
  const auto jp = json::parse(slurp(d / "p/sweep_position.json"));
  CHECK(jp["results"]["trajectories_per_point"] == 2);
  CHECK(jp["results"]["points"][1]["value"] == 0.63);
}
