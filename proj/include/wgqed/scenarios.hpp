// scenarios.hpp - named parameter sweeps that regenerate the published
// figures and tables as CSV datasets, checked against expected values.
//
// A scenario is a list of cases (one system config each) and an optional
// shared sweep. Three kinds:
//   raman     optimize p_raman per sweep point
//   modes     eigenmodes of the bare array
//   protocol  optimize each node, then sweep the mean photon number n_bar
// Scenario files use the same JSON conventions as config files.

#pragma once

#include "wgqed/config.hpp"
#include "wgqed/optimize.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wgqed {

enum class ScenarioKind { raman, modes, protocol };
enum class Provenance { paper, trivial, derived };

/// Closed-form approximations to the optimized Raman probability.
enum class Approximation {
  none,
  beta_squared,        // β²
  perturbative_1qd,    // β²·g²/ω²
  exact_1qd,           // β²·g²/(g² + ω²)
  two_qd_slope,        // β²/(1 − β²)·(g/ω)²
  four_qd_fit,         // 0.11·x²/(x² + (0.79/β − 0.62)²)², x = g/ω
};

const char* to_string(ScenarioKind k);
const char* to_string(Provenance p);
const char* to_string(Approximation a);

double approximate_p_raman(Approximation a, double beta, double g_over_omega);

/// Parameters a sweep may vary: g_s_ghz, omega_q_ghz, delta_ghz (configs),
/// beta (all emitters, Γ_1D fixed), gamma_1d_ns (all emitters, β fixed), n_bar (protocol).
struct Sweep {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 2;
  bool log_spaced = false;

  std::vector<double> values() const;
};

SystemConfig apply_sweep_value(const SystemConfig& config, const std::string& parameter, double value);

struct OptimizerSettings {
  FreeParameters free = FreeParameters::delta;
  std::size_t budget = 0;
  std::optional<std::pair<double, double>> delta_ghz_range;
  std::optional<std::pair<double, double>> Delta_ghz_range;

  OptimizeOptions options() const;
};

struct ScenarioCase {
  std::string label;
  SystemConfig config;
  OptimizerSettings optimizer;
  Approximation approximation = Approximation::none;
};

/// Quantities by kind:
///   raman     p_raman, gamma_a_ratio (Γ_A,1D at the optimum over β(1−β)Γ; two emitters)
///   modes     nu_over_gamma_1d, alpha4, dark_gamma_1d_fraction
///   protocol  bound_violations, small_nbar_ratio (P_suc/(η·n̄·q) at the point)
struct Expectation {
  std::string case_label;
  std::optional<double> point;  // sweep value; required when the scenario sweeps
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  bool relative = true;
  Provenance provenance = Provenance::derived;
  std::string note;
};

struct Scenario {
  std::string name;
  std::string description;
  ScenarioKind kind = ScenarioKind::raman;
  std::vector<ScenarioCase> cases;
  std::optional<Sweep> sweep;
  double eta = 1.0;  // protocol only
  std::vector<Expectation> expected;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

std::vector<std::string> builtin_scenario_names();
/// Throws std::out_of_range for unknown names.
Scenario builtin_scenario(const std::string& name);

struct ExpectationResult {
  Expectation expectation;
  double actual = 0.0;
  bool passed = false;
};

struct ScenarioRun {
  std::string name;
  std::string csv;
  std::vector<ExpectationResult> report;

  bool all_passed() const;
  nlohmann::json report_json() const;
};

ScenarioRun run(const Scenario& scenario);

}  // namespace wgqed
