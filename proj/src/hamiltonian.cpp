#include "wgqed/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace wgqed {

std::size_t EffectiveHamiltonian::emitter_count() const {
  return has_tls() ? basis.size() / 2 : basis.size();
}

Eigen::MatrixXcd EffectiveHamiltonian::decay_matrix() const {
  return -(matrix - matrix.adjoint()) / cplx(0.0, 2.0);
}

Eigen::MatrixXcd EffectiveHamiltonian::hermitian_part() const {
  return (matrix + matrix.adjoint()) / 2.0;
}

EffectiveHamiltonian EffectiveHamiltonian::shifted(AngularFrequency delta) const {
  EffectiveHamiltonian out = *this;
  out.matrix.diagonal().array() -= delta.rad_per_s();
  out.delta_applied = true;
  return out;
}

cplx collective_coupling(const EmitterParams& m, const EmitterParams& n) {
  const double amp = 0.5 * std::sqrt(m.gamma_1d * n.gamma_1d);
  const double phase = std::abs(m.kz - n.kz);
  // -(i/2)√(ΓΓ)·e^{iφ} = (1/2)√(ΓΓ)·(sin φ - i cos φ)
  return {amp * std::sin(phase), -amp * std::cos(phase)};
}

EffectiveHamiltonian build_bare(const std::vector<EmitterParams>& emitters) {
  const auto n = emitters.size();
  if (n < 1 || n > kMaxEmitters) throw std::invalid_argument("build_bare: DIMENSION_EXCEEDED");
  EffectiveHamiltonian h;
  const auto dim = static_cast<Eigen::Index>(n);
  h.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    const auto& em = emitters[static_cast<std::size_t>(m)];
    h.matrix(m, m) = cplx(em.delta_i.rad_per_s(), -0.5 * em.gamma_total());
    for (Eigen::Index k = m + 1; k < dim; ++k) {
      const cplx omega = collective_coupling(em, emitters[static_cast<std::size_t>(k)]);
      h.matrix(m, k) = omega;
      h.matrix(k, m) = omega;
    }
    h.basis.push_back({static_cast<std::size_t>(m), TlsState::none});
  }
  return h;
}

EffectiveHamiltonian build_with_tls(const std::vector<EmitterParams>& emitters, const TlsParams& tls) {
  const auto bare = build_bare(emitters);
  const auto n = bare.dim();
  if (tls.coupled_emitter >= emitters.size()) throw std::invalid_argument("build_with_tls: BAD_INDEX");

  EffectiveHamiltonian h;
  h.matrix = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  h.matrix.topLeftCorner(n, n) = bare.matrix;
  h.matrix.bottomRightCorner(n, n) = bare.matrix;
  h.matrix.bottomRightCorner(n, n).diagonal().array() += tls.omega_q.rad_per_s();
  const auto c = static_cast<Eigen::Index>(tls.coupled_emitter);
  h.matrix(c, n + c) = tls.coupling_matrix_element();
  h.matrix(n + c, c) = tls.coupling_matrix_element();

  for (auto s : {TlsState::zero, TlsState::one}) {
    for (std::size_t m = 0; m < emitters.size(); ++m) h.basis.push_back({m, s});
  }
  return h;
}

EffectiveHamiltonian build(const SystemConfig& config) {
  require_valid(config);
  return config.tls ? build_with_tls(config.emitters, *config.tls) : build_bare(config.emitters);
}

}  // namespace wgqed
