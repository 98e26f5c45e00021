#include "wgqed/collective.hpp"

#include "wgqed/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace wgqed {

namespace {

double array_mean_gamma_1d(const std::vector<EmitterParams>& emitters) {
  double s = 0.0;
  for (const auto& e : emitters) s += e.gamma_1d;
  return s / static_cast<double>(emitters.size());
}

CollectiveMode make_mode(const std::vector<EmitterParams>& emitters, Eigen::VectorXcd v, double energy,
                         double gamma_total) {
  CollectiveMode m;
  m.energy_shift = AngularFrequency::from_rad_per_s(energy);
  m.gamma_total = gamma_total;
  m.gamma_1d = waveguide_emission_rate(emitters, v);
  m.gamma_prime = leakage_rate(emitters, v);
  m.dark = m.gamma_1d < array_mean_gamma_1d(emitters);
  m.vector = std::move(v);
  return m;
}

void sort_modes(std::vector<CollectiveMode>& modes) {
  std::stable_sort(modes.begin(), modes.end(), [](const CollectiveMode& a, const CollectiveMode& b) {
    if (a.energy_shift.rad_per_s() != b.energy_shift.rad_per_s()) {
      return a.energy_shift.rad_per_s() < b.energy_shift.rad_per_s();
    }
    return a.gamma_total < b.gamma_total;
  });
}

// Global phase: first component with non-negligible magnitude made real positive.
Eigen::VectorXcd fix_phase(Eigen::VectorXcd v) {
  v.normalize();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v;
}

}  // namespace

double waveguide_emission_rate(const std::vector<EmitterParams>& emitters, const Eigen::VectorXcd& v) {
  cplx fwd{}, bwd{};
  for (std::size_t m = 0; m < emitters.size(); ++m) {
    const double amp = std::sqrt(emitters[m].gamma_1d);
    const auto vm = v(static_cast<Eigen::Index>(m));
    fwd += std::polar(amp, emitters[m].kz) * vm;
    bwd += std::polar(amp, -emitters[m].kz) * vm;
  }
  return 0.5 * std::norm(fwd) + 0.5 * std::norm(bwd);
}

double leakage_rate(const std::vector<EmitterParams>& emitters, const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (std::size_t m = 0; m < emitters.size(); ++m) s += std::norm(v(static_cast<Eigen::Index>(m))) * emitters[m].gamma_prime;
  return s;
}

ModeAnalysis eigenmodes(const std::vector<EmitterParams>& emitters) {
  const auto h = build_bare(emitters);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.matrix, true);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenmodes: eigendecomposition failed");

  ModeAnalysis out;
  const auto& vals = solver.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    out.modes.push_back(make_mode(emitters, fix_phase(solver.eigenvectors().col(k)), vals(k).real(), -2.0 * vals(k).imag()));
  }
  const double scale = h.matrix.norm();
  for (Eigen::Index a = 0; a < vals.size(); ++a) {
    for (Eigen::Index b = a + 1; b < vals.size(); ++b) {
      if (std::abs(vals(a) - vals(b)) < 1e-9 * scale) out.degenerate = true;
    }
  }
  sort_modes(out.modes);
  return out;
}

ModeAnalysis hermitian_part_modes(const std::vector<EmitterParams>& emitters) {
  const auto h = build_bare(emitters);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.hermitian_part());
  const Eigen::MatrixXcd decay = h.decay_matrix();

  ModeAnalysis out;
  const auto& vals = solver.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    Eigen::VectorXcd v = fix_phase(solver.eigenvectors().col(k));
    const double g = 2.0 * (v.adjoint() * decay * v)(0, 0).real();
    out.modes.push_back(make_mode(emitters, std::move(v), vals(k), g));
  }
  const double scale = h.matrix.norm();
  for (Eigen::Index k = 0; k + 1 < vals.size(); ++k) {
    if (vals(k + 1) - vals(k) < 1e-9 * scale) out.degenerate = true;
  }
  sort_modes(out.modes);
  return out;
}

TwoModeAnalysis two_qd_modes(const EmitterParams& e1_in, const EmitterParams& e2_in, AngularFrequency Delta) {
  EmitterParams e1 = e1_in;
  EmitterParams e2 = e2_in;
  e1.delta_i = 0.5 * Delta;
  e2.delta_i = -0.5 * Delta;
  const std::vector<EmitterParams> pair{e1, e2};

  const cplx h11(0.5 * Delta.rad_per_s(), -0.5 * e1.gamma_total());
  const cplx h22(-0.5 * Delta.rad_per_s(), -0.5 * e2.gamma_total());
  const cplx omega = collective_coupling(e1, e2);
  const cplx mean = 0.5 * (h11 + h22);
  const cplx half_diff = 0.5 * (h11 - h22);
  const cplx root = std::sqrt(half_diff * half_diff + omega * omega);

  auto eigvec = [&](cplx lambda) {
    // Two algebraically equivalent forms; keep the better-conditioned one.
    Eigen::Vector2cd a(omega, lambda - h11);
    Eigen::Vector2cd b(lambda - h22, omega);
    return fix_phase(a.norm() >= b.norm() ? a : b);
  };

  std::array<cplx, 2> lambdas{mean + root, mean - root};
  std::array<CollectiveMode, 2> modes;
  for (std::size_t k = 0; k < 2; ++k) {
    modes[k] = make_mode(pair, eigvec(lambdas[k]), lambdas[k].real(), -2.0 * lambdas[k].imag());
  }
  const std::size_t ia = modes[0].gamma_1d <= modes[1].gamma_1d ? 0 : 1;

  TwoModeAnalysis out;
  out.mode_a = modes[ia];
  out.mode_s = modes[1 - ia];
  out.xi1 = out.mode_a.vector(0);
  out.xi2 = -out.mode_a.vector(1);
  out.zeta1 = out.mode_s.vector(0);
  out.zeta2 = out.mode_s.vector(1);

  // Printed closed forms (|ξ|², Re ξ1*ξ2 for complex coefficients).
  const double g1 = e1.gamma_1d, g2 = e2.gamma_1d;
  const double cross = std::sqrt(g1 * g2) * std::cos(std::abs(e1.kz - e2.kz));
  out.mode_a.gamma_1d = std::norm(out.xi1) * g1 + std::norm(out.xi2) * g2 - 2.0 * (std::conj(out.xi1) * out.xi2).real() * cross;
  out.mode_s.gamma_1d = std::norm(out.zeta1) * g1 + std::norm(out.zeta2) * g2 + 2.0 * (std::conj(out.zeta1) * out.zeta2).real() * cross;
  out.mode_a.gamma_prime = std::norm(out.xi1) * e1.gamma_prime + std::norm(out.xi2) * e2.gamma_prime;
  out.mode_s.gamma_prime = std::norm(out.zeta1) * e1.gamma_prime + std::norm(out.zeta2) * e2.gamma_prime;
  return out;
}

AngularFrequency solve_delta_for_gamma_a(const EmitterParams& e1, const EmitterParams& e2, double target) {
  auto f = [&](double d) {
    return two_qd_modes(e1, e2, AngularFrequency::from_rad_per_s(d)).mode_a.gamma_1d - target;
  };
  const double scale = e1.gamma_total() + e2.gamma_total();
  const double f0 = f(0.0);
  if (std::abs(f0) <= 1e-12 * scale) return AngularFrequency{};

  const double d_max = 20.0 * scale;
  constexpr int kScan = 4000;
  double lo = 0.0, flo = f0;
  for (int k = 1; k <= kScan; ++k) {
    double hi = d_max * static_cast<double>(k) / kScan;
    const double fhi = f(hi);
    if ((flo < 0.0) != (fhi < 0.0) || fhi == 0.0) {
      if (fhi == 0.0) return AngularFrequency::from_rad_per_s(hi);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-12 * std::max(std::abs(target), 1e-300) || hi - lo <= 1e-15 * hi) {
          return AngularFrequency::from_rad_per_s(mid);
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return AngularFrequency::from_rad_per_s(0.5 * (lo + hi));
    }
    lo = hi;
    flo = fhi;
  }

  std::ostringstream os;
  os << "UNREACHABLE_TARGET: Gamma_A,1D = " << target << " /s not reachable for Delta in [0, " << d_max << "] rad/s";
  throw NumericalError(NumericalErrorCode::unreachable_target, os.str());
}

}  // namespace wgqed
