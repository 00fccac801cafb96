#pragma once

// Pass/fail checks on landscape, simulation and sweep results. Shared by
// `qubot --check` and the acceptance suite so both apply the same tolerances.

#include <string>
#include <vector>

#include "qubot/ensemble.hpp"
#include "qubot/logical_model.hpp"
#include "qubot/potentials.hpp"

namespace qubot::checks {

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

bool all_pass(const std::vector<Check>& cs);

// Target <J_par> in rad/s for the named preset, 0 if there is none.
double jpar_target(const std::string& preset);

// Minima spacing, trap frequencies, psi-/psi+ coincidence, <J_par> and
// compensating field; for paper_appendix_c also the protected state.
std::vector<Check> landscape_checks(const std::string& preset, const Landscape& land,
                                    const ParallelFieldReport& field);

struct SimulationSummary {
  SteadyState steady;
  bool settled = false;
  Settling settling{0.0, 0.0};
  std::string settling_error;
  bool has_pearson = false;
  double pearson = 0.0;
  std::string pearson_error;
};

SimulationSummary summarize(const EnsembleStats& stats, double gamma, double steady_start);

// Steady-state band, advantage over free decoherence for t >= 6 ms,
// settling consistency and rate anti-correlation.
std::vector<Check> simulation_checks(const EnsembleStats& stats, const SimulationSummary& s,
                                     double gamma);

std::vector<Check> position_sweep_checks(const SweepResult& r);
std::vector<Check> temperature_sweep_checks(const SweepResult& r);

std::vector<Check> logical_checks(const logical::Table1Report& table,
                                  const std::vector<logical::EquilibriumResult>& eq);

}  // namespace qubot::checks
