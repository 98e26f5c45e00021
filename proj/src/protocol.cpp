#include "wgqed/protocol.hpp"

#include "wgqed/scattering.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace wgqed {

namespace {

void check_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

NodeResponse node_response(const SystemConfig& config) {
  if (!config.tls) throw std::invalid_argument("node_response: config needs a TLS");
  const auto r0 = ScatteringProblem(config, TlsState::zero).at(config.delta);
  const auto r1 = ScatteringProblem(config, TlsState::one).at(config.delta);
  NodeResponse n;
  n.q = r0.p_raman;
  n.d = 0.5 * (std::norm(r0.t_coeff - r1.t_coeff) + std::norm(r0.r_coeff - r1.r_coeff));
  return n;
}

ProtocolResult single_photon_protocol(double p_raman, double eta) {
  check_probability(p_raman, "p_raman");
  check_probability(eta, "eta");
  ProtocolResult r;
  r.p_success = eta * p_raman;
  r.fidelity = 1.0;
  return r;
}

ProtocolResult coherent_protocol(const NodeResponse& node1, const NodeResponse& node2, double n_bar, double eta,
                                 const ProtocolOptions& options) {
  // Fixed node order keeps the result bitwise symmetric under swapping.
  const bool swap = std::tie(node2.q, node2.d) < std::tie(node1.q, node1.d);
  const NodeResponse& n1 = swap ? node2 : node1;
  const NodeResponse& n2 = swap ? node1 : node2;
  if (!(n_bar > 0.0) || !std::isfinite(n_bar)) throw std::invalid_argument("coherent_protocol: n_bar must be > 0");
  check_probability(eta, "eta");
  check_probability(n1.q, "q");
  check_probability(n2.q, "q");

  const double m1 = n_bar * n1.q;
  const double m2 = n_bar * n2.q;
  const double p1 = -std::expm1(-m1);
  const double p2 = -std::expm1(-m2);
  const double dephasing = options.rayleigh ? std::exp(-0.5 * n_bar * (n1.d + n2.d)) : 1.0;

  ProtocolResult r;
  r.p_success = 0.5 * eta * (p1 + p2);
  r.truncation_mass = (-std::expm1(-m1) - m1 * std::exp(-m1)) + (-std::expm1(-m2) - m2 * std::exp(-m2));
  r.truncation_warning = r.truncation_mass > kTruncationWarningFraction * r.p_success;

  const double norm = p1 + p2;
  if (!(norm > 0.0)) {
    r.fidelity = 0.0;
    return r;
  }
  const double a = std::sqrt(p1 * (1.0 - p2));
  const double b = std::sqrt(p2 * (1.0 - p1));
  r.breakdown.double_flip = 2.0 * p1 * p2 / norm;
  r.breakdown.other = 0.5 * (a - b) * (a - b) / norm;
  r.breakdown.rayleigh_dephasing = (1.0 - dephasing) * a * b / norm;
  r.fidelity = (0.5 * (a * a + b * b) + dephasing * a * b) / norm;
  return r;
}

ProtocolResult coherent_protocol(const SystemConfig& c1, const SystemConfig& c2, double n_bar, double eta,
                                 const ProtocolOptions& options) {
  return coherent_protocol(node_response(c1), node_response(c2), n_bar, eta, options);
}

}  // namespace wgqed
