// collective.hpp - super-/sub-radiant modes of the bare emitter array.
//
// Modes are the right eigenvectors of the full non-Hermitian matrix,
// normalized to unit length. For such a vector v with eigenvalue λ,
// -2·Im λ = 2·v†Dv splits exactly into a waveguide part (directional
// emission formula) and a leakage part Σ|v_m|²γ'_m.
//
// hermitian_part_modes() diagonalizes (H + H†)/2 instead. It is kept for
// diagnostics only: it is degenerate for co-located identical emitters and
// for four emitters at kΔz = π/2.

#pragma once

#include "wgqed/config.hpp"
#include "wgqed/hamiltonian.hpp"

#include <Eigen/Dense>

#include <vector>

namespace wgqed {

struct CollectiveMode {
  AngularFrequency energy_shift;
  double gamma_total = 0.0;  // -2·Im λ (or 2·v†Dv for Hermitian-part modes)
  double gamma_1d = 0.0;
  double gamma_prime = 0.0;
  bool dark = false;  // gamma_1d below the array average Σ Γ_m,1D / N; labeling only
  Eigen::VectorXcd vector;
};

struct ModeAnalysis {
  std::vector<CollectiveMode> modes;  // sorted by energy_shift, then gamma_total
  bool degenerate = false;            // DEGENERATE_SPECTRUM: two eigenvalues within 1e-9·‖H‖
};

/// ½|Σ √Γ_m,1D e^{+ikz_m} v_m|² + ½|Σ √Γ_m,1D e^{-ikz_m} v_m|².
double waveguide_emission_rate(const std::vector<EmitterParams>& emitters, const Eigen::VectorXcd& v);
/// Σ |v_m|² γ'_m.
double leakage_rate(const std::vector<EmitterParams>& emitters, const Eigen::VectorXcd& v);

ModeAnalysis eigenmodes(const std::vector<EmitterParams>& emitters);
ModeAnalysis hermitian_part_modes(const std::vector<EmitterParams>& emitters);

/// Two emitters with detunings ±Δ/2. A is the mode with the smaller
/// waveguide rate, written |A⟩ = ξ1|eg⟩ - ξ2|ge⟩ and |S⟩ = ζ1|eg⟩ + ζ2|ge⟩,
/// phases fixed so the first non-zero coefficient is real and positive.
/// When H is normal (e.g. identical emitters at Δ = 0) ζ1 = ξ2, ζ2 = ξ1.
struct TwoModeAnalysis {
  cplx xi1, xi2;
  cplx zeta1, zeta2;
  CollectiveMode mode_a, mode_s;
};

TwoModeAnalysis two_qd_modes(const EmitterParams& e1, const EmitterParams& e2, AngularFrequency Delta);

/// Smallest Δ ≥ 0 with Γ_A,1D(Δ) = target (scan + bisection, 1e-9 relative).
/// Throws NumericalError(UNREACHABLE_TARGET) if no Δ in [0, 20·(Γ1 + Γ2)] reaches it.
AngularFrequency solve_delta_for_gamma_a(const EmitterParams& e1, const EmitterParams& e2, double target_gamma_a_1d);

}  // namespace wgqed
