// scattering.hpp - single-photon elastic (Rayleigh) and TLS-flipping (Raman)
// amplitudes from the effective Hamiltonian.
//
// For an input photon at detuning δ, x = (H - δ·I)⁻¹·b with the in-coupling
// vector b_n = √Γ_n,1D·e^{i kz_n} on the initial TLS block. Amplitudes into
// transmission/reflection are S = ½·Σ_m u_m·x_m over the final TLS block,
// u_T,m = √Γ_m,1D·e^{-i kz_m}, u_R,m = √Γ_m,1D·e^{+i kz_m}.
//
// Output fields: t = 1 + i·s00_t, r = i·s00_r; red (flipped) fields
// i·s10_t, i·s10_r. A single k is used for both carrier and sideband.

#pragma once

#include "wgqed/config.hpp"
#include "wgqed/hamiltonian.hpp"
#include "wgqed/kernels/shifted_solve.hpp"

#include <span>
#include <vector>

namespace wgqed {

/// Solves above this pivot ratio raise SINGULAR_SOLVE.
inline constexpr double kSingularPivotRatio = 1e12;

struct ScatteringResult {
  AngularFrequency delta;
  TlsState initial = TlsState::zero;
  cplx s00_t, s00_r;  // elastic: initial TLS state -> same state
  cplx s10_t, s10_r;  // flip: initial TLS state -> other state
  cplx t_coeff;       // 1 + i·s00_t
  cplx r_coeff;       // i·s00_r
  double p_raman = 0.0;    // (|s10_t| + |s10_r|)², both directions combined coherently
  double p_raman_t = 0.0;  // |s10_t|²
  double p_raman_r = 0.0;  // |s10_r|²
  double p_loss = 0.0;     // 1 - |t|² - |r|² - |s10_t|² - |s10_r|²
  double pivot_ratio = 0.0;
};

/// Precomputed solver for one configuration. Evaluating at many detunings
/// reuses the Hamiltonian and runs the batched kernel.
class ScatteringProblem {
public:
  explicit ScatteringProblem(const SystemConfig& config, TlsState initial = TlsState::zero,
                             kernels::Backend backend = kernels::default_backend());

  ScatteringResult at(AngularFrequency delta) const;
  /// Detunings in rad/s. Throws NumericalError(SINGULAR_SOLVE) on any ill-conditioned point.
  std::vector<ScatteringResult> at(std::span<const double> deltas) const;
  /// Only p_raman, for optimizer scans.
  std::vector<double> raman_probabilities(std::span<const double> deltas) const;

  const EffectiveHamiltonian& hamiltonian() const { return h_; }

private:
  ScatteringResult assemble(double delta, std::span<const cplx> x, double pivot_ratio) const;

  EffectiveHamiltonian h_;
  TlsState initial_;
  kernels::Backend backend_;
  std::size_t n_ = 0;          // emitters
  double shift_offset_ = 0.0;  // ω_q when the TLS starts in |1⟩
  kernels::ShiftedSystem system_;
  std::vector<cplx> out_t_, out_r_;
};

ScatteringResult amplitudes(const SystemConfig& config, AngularFrequency delta);
/// p_raman at δ; also available per direction through amplitudes().
double raman_probability(const SystemConfig& config, AngularFrequency delta);
/// Uniform grid from..to inclusive, n_points ≥ 2, evaluated in parallel chunks.
std::vector<ScatteringResult> spectrum(const SystemConfig& config, AngularFrequency from, AngularFrequency to,
                                       std::size_t n_points);

}  // namespace wgqed
