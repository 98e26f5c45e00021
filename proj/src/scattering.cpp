#include "wgqed/scattering.hpp"

#include "wgqed/errors.hpp"
#include "wgqed/parallel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wgqed {

namespace {

std::vector<cplx> row_major(const Eigen::MatrixXcd& m) {
  std::vector<cplx> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  }
  return out;
}

[[noreturn]] void throw_singular(double delta, double ratio) {
  std::ostringstream os;
  os << "SINGULAR_SOLVE: pivot ratio " << ratio << " at delta = " << delta << " rad/s";
  throw NumericalError(NumericalErrorCode::singular_solve, os.str());
}

}  // namespace

ScatteringProblem::ScatteringProblem(const SystemConfig& config, TlsState initial, kernels::Backend backend)
    : h_(build(config)), initial_(initial), backend_(backend), n_(config.emitters.size()) {
  if (initial_ == TlsState::none) initial_ = TlsState::zero;
  if (initial_ == TlsState::one && !config.tls) {
    throw std::invalid_argument("ScatteringProblem: initial TLS state |1> requires a TLS");
  }
  if (initial_ == TlsState::one) shift_offset_ = config.tls->omega_q.rad_per_s();

  const auto dim = static_cast<std::size_t>(h_.dim());
  std::vector<cplx> b(dim, cplx{});
  const std::size_t in_block = (initial_ == TlsState::one) ? n_ : 0;
  out_t_.resize(n_);
  out_r_.resize(n_);
  for (std::size_t m = 0; m < n_; ++m) {
    const auto& e = config.emitters[m];
    const double amp = std::sqrt(e.gamma_1d);
    b[in_block + m] = std::polar(amp, e.kz);
    out_t_[m] = std::polar(amp, -e.kz);
    out_r_[m] = std::polar(amp, e.kz);
  }
  const auto a = row_major(h_.matrix);
  system_ = kernels::ShiftedSystem(dim, a, b);
}

ScatteringResult ScatteringProblem::assemble(double delta, std::span<const cplx> x, double pivot_ratio) const {
  if (!(pivot_ratio <= kSingularPivotRatio)) throw_singular(delta, pivot_ratio);
  ScatteringResult r;
  r.delta = AngularFrequency::from_rad_per_s(delta);
  r.initial = initial_;
  r.pivot_ratio = pivot_ratio;

  const bool tls = h_.has_tls();
  const std::size_t same = (initial_ == TlsState::one) ? n_ : 0;
  const std::size_t other = (initial_ == TlsState::one) ? 0 : n_;
  for (std::size_t m = 0; m < n_; ++m) {
    r.s00_t += out_t_[m] * x[same + m];
    r.s00_r += out_r_[m] * x[same + m];
    if (tls) {
      r.s10_t += out_t_[m] * x[other + m];
      r.s10_r += out_r_[m] * x[other + m];
    }
  }
  r.s00_t *= 0.5;
  r.s00_r *= 0.5;
  r.s10_t *= 0.5;
  r.s10_r *= 0.5;

  constexpr cplx i(0.0, 1.0);
  r.t_coeff = 1.0 + i * r.s00_t;
  r.r_coeff = i * r.s00_r;
  r.p_raman_t = std::norm(r.s10_t);
  r.p_raman_r = std::norm(r.s10_r);
  const double sum = std::abs(r.s10_t) + std::abs(r.s10_r);
  r.p_raman = sum * sum;
  r.p_loss = 1.0 - std::norm(r.t_coeff) - std::norm(r.r_coeff) - r.p_raman_t - r.p_raman_r;
  return r;
}

std::vector<ScatteringResult> ScatteringProblem::at(std::span<const double> deltas) const {
  std::vector<double> shifts(deltas.begin(), deltas.end());
  for (auto& s : shifts) s += shift_offset_;
  const auto sol = kernels::solve_shifted(system_, shifts, backend_);
  std::vector<ScatteringResult> out;
  out.reserve(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) out.push_back(assemble(deltas[k], sol.at(k), sol.pivot_ratio[k]));
  return out;
}

ScatteringResult ScatteringProblem::at(AngularFrequency delta) const {
  const double d = delta.rad_per_s();
  return at(std::span<const double>(&d, 1)).front();
}

std::vector<double> ScatteringProblem::raman_probabilities(std::span<const double> deltas) const {
  std::vector<double> p(deltas.size());
  const auto res = at(deltas);
  for (std::size_t k = 0; k < res.size(); ++k) p[k] = res[k].p_raman;
  return p;
}

ScatteringResult amplitudes(const SystemConfig& config, AngularFrequency delta) {
  return ScatteringProblem(config).at(delta);
}

double raman_probability(const SystemConfig& config, AngularFrequency delta) {
  return amplitudes(config, delta).p_raman;
}

std::vector<ScatteringResult> spectrum(const SystemConfig& config, AngularFrequency from, AngularFrequency to,
                                       std::size_t n_points) {
  if (n_points < 2) throw std::invalid_argument("spectrum: n_points must be >= 2");
  const ScatteringProblem problem(config);
  const double a = from.rad_per_s();
  const double b = to.rad_per_s();
  std::vector<double> grid(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    grid[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n_points - 1);
  }
  std::vector<ScatteringResult> out(n_points);
  parallel_for(n_points, 256, [&](std::size_t begin, std::size_t end) {
    const auto part = problem.at(std::span<const double>(grid.data() + begin, end - begin));
    std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
  });
  return out;
}

}  // namespace wgqed
