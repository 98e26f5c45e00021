// protocol.hpp - heralded entanglement of two transducer nodes behind a
// Mach-Zehnder interferometer.
//
// Coherent-input model, per node j with per-photon Raman probability q_j:
//   p_j = 1 - exp(-n̄·q_j)                  probability the node's TLS flipped
//   herald weight η/2 per red photon at the heralding port
//   P_suc = η·(p_1 + p_2)/2
// The heralded state mixes a|10⟩ + b|01⟩ (a² = p_1(1-p_2), b² = p_2(1-p_1),
// coherence scaled by the Rayleigh factor D) with |11⟩⟨11| of weight 2·p_1·p_2.
// Fidelity is taken against Ψ⁺ = (|10⟩ + |01⟩)/√2.
//   D = exp(-n̄·(d_1 + d_2)/2),  d_j = |u_0 - u_1|²/2
// where u_s = (t, r) are the elastic output amplitudes with the TLS in |s⟩.

#pragma once

#include "wgqed/config.hpp"

#include <cstddef>
#include <vector>

namespace wgqed {

struct InfidelityBreakdown {
  double double_flip = 0.0;         // both nodes flipped
  double rayleigh_dephasing = 0.0;  // coherence lost to elastic scattering
  double other = 0.0;               // amplitude imbalance between the nodes
};

struct ProtocolResult {
  double fidelity = 1.0;
  double p_success = 0.0;
  InfidelityBreakdown breakdown;
  double truncation_mass = 0.0;  // Σ_j P(two or more Raman events at node j)
  bool truncation_warning = false;
};

/// Per-photon response of one node at its configured δ.
struct NodeResponse {
  double q = 0.0;  // Raman probability
  double d = 0.0;  // Rayleigh distinguishability |u_0 - u_1|²/2
};

NodeResponse node_response(const SystemConfig& config);

struct ProtocolOptions {
  bool rayleigh = true;  // false: D = 1
};

ProtocolResult single_photon_protocol(double p_raman, double eta);

ProtocolResult coherent_protocol(const NodeResponse& node1, const NodeResponse& node2, double n_bar, double eta,
                                 const ProtocolOptions& options = {});
ProtocolResult coherent_protocol(const SystemConfig& config1, const SystemConfig& config2, double n_bar, double eta,
                                 const ProtocolOptions& options = {});

/// Truncation mass above this fraction of P_suc sets truncation_warning.
inline constexpr double kTruncationWarningFraction = 1e-4;

}  // namespace wgqed
