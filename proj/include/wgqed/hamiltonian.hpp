// hamiltonian.hpp - non-Hermitian effective Hamiltonian of the
// single-excitation manifold, with and without the TLS.
//
// Basis ordering: emitter m excited (all others ground), first every
// TLS-state-0 state by emitter index, then every TLS-state-1 state. Without
// a TLS only the emitter index is used.
//
// The matrix never contains the probe detuning; callers apply -δ·I.

#pragma once

#include "wgqed/config.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace wgqed {

using cplx = std::complex<double>;

enum class TlsState : int { none = -1, zero = 0, one = 1 };

struct BasisLabel {
  std::size_t excited_emitter = 0;
  TlsState tls_state = TlsState::none;
  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

struct EffectiveHamiltonian {
  Eigen::MatrixXcd matrix;
  std::vector<BasisLabel> basis;
  bool delta_applied = false;

  Eigen::Index dim() const { return matrix.rows(); }
  std::size_t emitter_count() const;
  bool has_tls() const { return !basis.empty() && basis.front().tls_state != TlsState::none; }

  /// -(H - H†)/(2i): the (positive semidefinite) decay matrix.
  Eigen::MatrixXcd decay_matrix() const;
  /// (H + H†)/2.
  Eigen::MatrixXcd hermitian_part() const;
  /// H - δ·I.
  EffectiveHamiltonian shifted(AngularFrequency delta) const;
};

/// Waveguide-mediated coupling Ω_mn = -(i/2)·√(Γ_m,1D Γ_n,1D)·exp(i|kz_m - kz_n|).
cplx collective_coupling(const EmitterParams& m, const EmitterParams& n);

/// N×N: diagonal delta_i - iΓ_i/2, off-diagonal Ω_mn.
EffectiveHamiltonian build_bare(const std::vector<EmitterParams>& emitters);

/// 2N×2N: [[H, C], [C, H + ω_q·I]] with C = (coupling element)·|c⟩⟨c|.
EffectiveHamiltonian build_with_tls(const std::vector<EmitterParams>& emitters, const TlsParams& tls);

/// Dispatches on config.tls; validates first.
EffectiveHamiltonian build(const SystemConfig& config);

}  // namespace wgqed
