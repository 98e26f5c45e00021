#include "support.hpp"

#include "wgqed/collective.hpp"
#include "wgqed/errors.hpp"
#include "wgqed/scattering.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cstring>

using namespace wgqed;
using namespace wgqed::test;

namespace {

constexpr cplx I{0.0, 1.0};

// Independent 2×2 inverse for one emitter with the TLS (g_s/2 element).
struct OneQdOracle {
  double g1d, gamma, wq, g;
  cplx det(double d) const {
    return (cplx(-d, -gamma / 2)) * (cplx(wq - d, -gamma / 2)) - g * g / 4.0;
  }
  cplx s00_t(double d) const { return 0.5 * g1d * cplx(wq - d, -gamma / 2) / det(d); }
  cplx s10_t(double d) const { return 0.5 * g1d * (-g / 2.0) / det(d); }
};

double conservation(const ScatteringResult& r) {
  return std::norm(r.t_coeff) + std::norm(r.r_coeff) + r.p_raman_t + r.p_raman_r;
}

}  // namespace

TEST_SUITE("scattering") {
  TEST_CASE("resonant extinction t = 1 - beta") {
    for (double beta : {0.5, 0.9, 0.98}) {
      auto c = one_qd_units(beta, 5.0, 0.0);
      const auto r = amplitudes(c, {});
      CHECK(std::abs(r.t_coeff - cplx(1.0 - beta, 0.0)) <= 1e-12);
      CHECK(r.s10_t == cplx(0.0, 0.0));
      CHECK(r.p_raman == 0.0);
    }
  }

  TEST_CASE("no TLS: elastic only") {
    SystemConfig c;
    c.emitters.push_back(EmitterParams::with_beta(1e9, 0.9));
    const auto r = amplitudes(c, {});
    CHECK(std::abs(r.t_coeff - 0.1) <= 1e-12);
    CHECK(r.p_raman == 0.0);
  }

  TEST_CASE("generic solver matches the analytic 2x2 inverse") {
    for (double beta : {0.5, 0.9, 0.98}) {
      const auto c = one_qd_units(beta, 3.0, 1.7);
      const auto& e = c.emitters[0];
      const OneQdOracle o{e.gamma_1d, e.gamma_total(), c.tls->omega_q.rad_per_s(), c.tls->g_s.rad_per_s()};
      const ScatteringProblem p(c);
      for (int k = -40; k <= 80; ++k) {
        const double d = 0.1e9 * k;
        const auto r = p.at(AngularFrequency::from_rad_per_s(d));
        CHECK(std::abs(r.s10_t - o.s10_t(d)) <= 1e-12 * std::max(1.0, std::abs(o.s10_t(d))));
        CHECK(std::abs(r.s00_t - o.s00_t(d)) <= 1e-12 * std::max(1.0, std::abs(o.s00_t(d))));
        // Single emitter: both directions equal, p_raman = Γ_1D²·|⟨e1|G|e0⟩|².
        CHECK(std::abs(r.s10_r) == doctest::Approx(std::abs(r.s10_t)).epsilon(1e-14));
        const double g_elem = std::abs(-0.5 * o.g / o.det(d));
        CHECK(r.p_raman == doctest::Approx(o.g1d * o.g1d * g_elem * g_elem).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("probability conservation for lossless configs") {
    Rng rng(31);
    for (std::size_t n : {1u, 2u, 4u}) {
      for (int i = 0; i < 60; ++i) {
        const auto c = random_config(rng, n, true);
        const ScatteringProblem p(c);
        const double d = per_ns(rng.uniform(-20.0, 40.0));
        const auto r = p.at(AngularFrequency::from_rad_per_s(d));
        CHECK(conservation(r) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(r.p_loss) <= 1e-9);
      }
    }
  }

  TEST_CASE("losses are non-negative and p_raman is a probability") {
    Rng rng(32);
    for (int i = 0; i < 200; ++i) {
      const auto c = random_config(rng, 1 + rng.index(6), false);
      const auto r = amplitudes(c, AngularFrequency::from_ghz(rng.uniform(-5, 10)));
      CHECK(r.p_loss >= -1e-12);
      CHECK(r.p_raman >= 0.0);
      CHECK(r.p_raman <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("initial TLS state |1> matches the analytic inverse") {
    // For one emitter, starting in |1⟩ at δ is the |0⟩ problem with ω_q → -ω_q.
    auto c = one_qd_units(0.9, 3.0, 1.2);
    const double d = 0.4e9;
    const auto r1 = ScatteringProblem(c, TlsState::one).at(AngularFrequency::from_rad_per_s(d));
    const auto& e = c.emitters[0];
    const double wq = c.tls->omega_q.rad_per_s(), g = c.tls->g_s.rad_per_s();
    const cplx det = cplx(-d, -e.gamma_total() / 2) * cplx(-wq - d, -e.gamma_total() / 2) - g * g / 4.0;
    const cplx want = 0.5 * e.gamma_1d * cplx(-wq - d, -e.gamma_total() / 2) / det;
    CHECK(std::abs(r1.s00_t - want) <= 1e-12);
    CHECK(r1.initial == TlsState::one);
  }

  TEST_CASE("elastic transmission is reciprocal under mirror reflection") {
    Rng rng(33);
    for (int i = 0; i < 50; ++i) {
      const std::size_t n = 2 + rng.index(4);
      const auto c = random_config(rng, n, false);
      SystemConfig rev = c;
      for (std::size_t m = 0; m < n; ++m) {
        rev.emitters[m] = c.emitters[n - 1 - m];
        rev.emitters[m].kz = -c.emitters[n - 1 - m].kz;
      }
      rev.tls->coupled_emitter = n - 1 - c.tls->coupled_emitter;
      const auto d = AngularFrequency::from_ghz(rng.uniform(-2, 6));
      const auto a = amplitudes(c, d);
      const auto b = amplitudes(rev, d);
      CHECK(std::abs(a.s00_t - b.s00_t) <= 1e-12 * std::max(1.0, std::abs(a.s00_t)));
    }
  }

  TEST_CASE("single-emitter Lorentzian dip") {
    SystemConfig c;
    c.emitters.push_back(EmitterParams::with_beta(1e9, 0.9));
    const double gamma = c.emitters[0].gamma_total();
    const ScatteringProblem p(c);
    const auto at0 = p.at(AngularFrequency{});
    CHECK(std::norm(at0.t_coeff) == doctest::Approx(0.01).epsilon(1e-12));
    // |r|² is Lorentzian with FWHM Γ.
    const auto half = p.at(AngularFrequency::from_rad_per_s(0.5 * gamma));
    CHECK(std::norm(half.r_coeff) == doctest::Approx(0.5 * std::norm(at0.r_coeff)).epsilon(1e-12));
  }

  TEST_CASE("two co-located QDs show only the superradiant width") {
    auto c = make_array(2, 1.0, 0.9, 0.0, 5.0, 0.0);
    c.tls.reset();
    const double gs = 2.0 * c.emitters[0].gamma_1d + c.emitters[0].gamma_prime;
    const ScatteringProblem p(c);
    const double r0 = std::norm(p.at(AngularFrequency{}).r_coeff);
    const double rh = std::norm(p.at(AngularFrequency::from_rad_per_s(0.5 * gs)).r_coeff);
    CHECK(rh == doctest::Approx(0.5 * r0).epsilon(1e-12));
  }

  ScatteringResult p_at_zero(const SystemConfig& c) { return ScatteringProblem(c).at(AngularFrequency{}); }

  TEST_CASE("four lossless QDs at kΔz = π/2: transmission peaks are symmetric") {
    auto c = make_array(4, 1.0, 1.0, 0.5 * kPi, 0.0, 0.0);
    c.tls.reset();
    const double g1d = c.emitters[0].gamma_1d;
    const auto res = spectrum(c, AngularFrequency::from_rad_per_s(-1.2 * g1d),
                              AngularFrequency::from_rad_per_s(1.2 * g1d), 4801);
    // Lossless: |t|² has narrow transmission peaks at the dark-mode energies.
    std::vector<double> peaks;
    for (std::size_t k = 1; k + 1 < res.size(); ++k) {
      const double t = std::norm(res[k].t_coeff);
      if (t > std::norm(res[k - 1].t_coeff) && t > std::norm(res[k + 1].t_coeff) && t > 0.5) {
        peaks.push_back(res[k].delta.rad_per_s() / g1d);
      }
    }
    REQUIRE(peaks.size() == 2);
    const double step = 2.4 / 4800.0;
    CHECK(std::abs(peaks[0] + peaks[1]) <= 2.0 * step);
    CHECK(std::norm(p_at_zero(c).t_coeff) < 0.5);
  }

  TEST_CASE("spectrum preserves grid order and equals pointwise evaluation") {
    const auto c = make_array(2, 1.0, 0.9, 0.4, 5.0, 1.0);
    const auto res = spectrum(c, AngularFrequency::from_ghz(-3.0), AngularFrequency::from_ghz(8.0), 777);
    const ScatteringProblem p(c);
    for (std::size_t k = 0; k < res.size(); k += 37) {
      const auto one = p.at(res[k].delta);
      CHECK(std::memcmp(&one.s10_t, &res[k].s10_t, sizeof(cplx)) == 0);
      if (k > 0) CHECK(res[k].delta.rad_per_s() > res[k - 1].delta.rad_per_s());
    }
    CHECK(res.front().delta.to_ghz() == doctest::Approx(-3.0));
    CHECK(res.back().delta.to_ghz() == doctest::Approx(8.0));
    CHECK_THROWS_AS(spectrum(c, {}, {}, 1), std::invalid_argument);
  }

  TEST_CASE("scalar and AVX2 backends agree bitwise through the scattering path") {
    if (!kernels::available(kernels::Backend::avx2)) return;
    const auto c = make_array(4, 24.7, 0.9, 0.5 * kPi, 5.0, 1.0, 1);
    std::vector<double> grid;
    for (int k = 0; k < 101; ++k) grid.push_back(1e8 * k - 2e9);
    const auto s = ScatteringProblem(c, TlsState::zero, kernels::Backend::scalar).raman_probabilities(grid);
    const auto v = ScatteringProblem(c, TlsState::zero, kernels::Backend::avx2).raman_probabilities(grid);
    CHECK(std::memcmp(s.data(), v.data(), s.size() * sizeof(double)) == 0);
  }

  TEST_CASE("singular systems raise SINGULAR_SOLVE") {
    // A nearly dead emitter next to a normal one makes the pivots differ by ~1e30.
    std::vector<EmitterParams> two{{1e-30, 0.0, 0.0, {}}, {1.0, 0.0, 0.0, {}}};
    SystemConfig c2;
    c2.emitters = two;
    try {
      (void)amplitudes(c2, AngularFrequency{});
      FAIL("expected SINGULAR_SOLVE");
    } catch (const NumericalError& e) {
      CHECK(e.code() == NumericalErrorCode::singular_solve);
    }
  }

  TEST_CASE("single-path approximation in the dark-state regime") {
    // P_R ≈ Γ_A,1D·Γ_S,1D·|⟨A1|(H-δ)⁻¹|S0⟩|² for small g_s/ω_q and Γ_S/Γ_A ≥ 10.
    auto c = make_array(2, 1.0, 0.9, 0.0, 5.0, 0.05);
    const double Delta = 0.45 * c.emitters[0].gamma_total();
    c.emitters[0].delta_i = AngularFrequency::from_rad_per_s(0.5 * Delta);
    c.emitters[1].delta_i = AngularFrequency::from_rad_per_s(-0.5 * Delta);
    const auto modes = two_qd_modes(make_array(2, 1.0, 0.9, 0.0, 5.0, 0.05).emitters[0],
                                    make_array(2, 1.0, 0.9, 0.0, 5.0, 0.05).emitters[1],
                                    AngularFrequency::from_rad_per_s(Delta));
    REQUIRE(modes.mode_s.gamma_1d / modes.mode_a.gamma_1d >= 10.0);

    const ScatteringProblem p(c);
    const auto& H = p.hamiltonian().matrix;
    double best_full = 0.0, best_single = 0.0;
    for (int k = 0; k <= 4000; ++k) {
      const double d = c.tls->omega_q.rad_per_s() + (k - 2000) * 1e6;
      const double full = p.at(AngularFrequency::from_rad_per_s(d)).p_raman;
      Eigen::VectorXcd s0 = Eigen::VectorXcd::Zero(4);
      s0.head(2) = modes.mode_s.vector;
      const Eigen::VectorXcd x = (H - d * Eigen::MatrixXcd::Identity(4, 4)).partialPivLu().solve(s0);
      const cplx amp = modes.mode_a.vector.dot(x.tail(2));
      const double single = modes.mode_a.gamma_1d * modes.mode_s.gamma_1d * std::norm(amp);
      best_full = std::max(best_full, full);
      best_single = std::max(best_single, single);
    }
    CHECK(best_single == doctest::Approx(best_full).epsilon(0.10));
  }
}
