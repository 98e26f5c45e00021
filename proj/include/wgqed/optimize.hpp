// optimize.hpp - maximize the Raman probability over the probe detuning δ
// and, for two emitters, the relative detuning Δ (applied as ±Δ/2).
//
// Search is two-stage and deterministic: a uniform grid plus analytic seeds,
// then golden-section refinement. In 2-D the search runs over Δ on the profile
// max_δ P(δ, Δ).

#pragma once

#include "wgqed/config.hpp"
#include "wgqed/kernels/shifted_solve.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace wgqed {

struct ResonanceGuess1qd {
  AngularFrequency delta_plus;
  AngularFrequency delta_minus;
  bool overdamped = false;  // ω_q² + g_s² < Γ²: both set to ω_q/2
};

/// δ± = (ω_q ± √(ω_q² + g_s² − Γ²))/2.
ResonanceGuess1qd resonance_guess_1qd(AngularFrequency omega_q, AngularFrequency g_s, double gamma);

/// δ = ω_q − √(Γ_1,1D Γ_2,1D)·sin(kΔz)/2 + g_s²/(4ω_q). Requires two emitters and ω_q > 0.
AngularFrequency resonance_guess_2qd(const SystemConfig& config);

/// Copy of a two-emitter config with emitter detunings shifted by +Δ/2 and −Δ/2.
SystemConfig with_relative_detuning(const SystemConfig& config, AngularFrequency Delta);

enum class FreeParameters { delta, delta_and_Delta };

struct Interval {
  AngularFrequency lo, hi;
};

struct OptimizeOptions {
  FreeParameters free = FreeParameters::delta;
  std::optional<Interval> delta_bounds;  // default: eigenvalue span of H ± 10·max Γ
  std::optional<Interval> Delta_bounds;  // default: [0, 10·max Γ]
  std::size_t budget = 0;                // 0: 4000 (δ only) or 60000 (δ, Δ); must be ≥ 100 otherwise
  kernels::Backend backend = kernels::default_backend();
};

struct OptimumReport {
  AngularFrequency best_delta;
  AngularFrequency best_Delta;  // zero unless Δ was free
  double p_raman_at_opt = 0.0;
  AngularFrequency closed_form_guess;
  AngularFrequency closed_form_guess_Delta;
  double p_raman_at_guess = 0.0;
  std::size_t n_evaluations = 0;
  bool converged = true;
  std::vector<std::string> flags;  // BUDGET_EXHAUSTED, OVERDAMPED, UNREACHABLE_TARGET

  bool has_flag(const std::string& f) const;
};

OptimumReport optimize_raman(const SystemConfig& config, const OptimizeOptions& options = {});

}  // namespace wgqed
