#include "support.hpp"

#include "wgqed/collective.hpp"
#include "wgqed/hamiltonian.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace wgqed;
using namespace wgqed::test;

namespace {

constexpr cplx I{0.0, 1.0};

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_SUITE("hamiltonian") {
  TEST_CASE("collective coupling examples") {
    const EmitterParams a{1e9, 0.0, 0.0, {}};
    EmitterParams b = a;
    CHECK(close(collective_coupling(a, b), -0.5e9 * I, 1e-6));
    b.kz = 0.5 * kPi;
    CHECK(close(collective_coupling(a, b), cplx(0.5e9, 0.0), 1e-6));
    // Γ1 = 1, Γ2 = 4, kΔz = π: -(i/2)·2·(-1) = +i.
    const EmitterParams c{1.0, 0.0, 0.0, {}};
    const EmitterParams d{4.0, 0.0, kPi, {}};
    CHECK(close(collective_coupling(c, d), I, 1e-15));
    CHECK(collective_coupling(c, d) == collective_coupling(d, c));
  }

  TEST_CASE("collective coupling splits into coherent and dissipative parts") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const EmitterParams m{rng.uniform(0.1, 3.0), 0.0, rng.uniform(-5, 5), {}};
      const EmitterParams n{rng.uniform(0.1, 3.0), 0.0, rng.uniform(-5, 5), {}};
      const double s = std::sqrt(m.gamma_1d * n.gamma_1d);
      const double phi = std::abs(m.kz - n.kz);
      const auto w = collective_coupling(m, n);
      CHECK(w.real() == doctest::Approx(0.5 * s * std::sin(phi)));
      CHECK(w.imag() == doctest::Approx(-0.5 * s * std::cos(phi)));
    }
  }

  TEST_CASE("single emitter bare matrix") {
    const auto h = build_bare({EmitterParams{1.0, 0.0, 0.0, {}}});
    REQUIRE(h.dim() == 1);
    CHECK(h.matrix(0, 0) == cplx(0.0, -0.5));
    CHECK_FALSE(h.has_tls());
  }

  TEST_CASE("two emitters with ±Δ/2 detunings") {
    std::vector<EmitterParams> e{{1.0, 0.2, 0.0, AngularFrequency::from_rad_per_s(0.3)},
                                 {1.0, 0.2, 0.0, AngularFrequency::from_rad_per_s(-0.3)}};
    const auto h = build_bare(e);
    CHECK(h.matrix(0, 0) == cplx(0.3, -0.6));
    CHECK(h.matrix(1, 1) == cplx(-0.3, -0.6));
    CHECK(close(h.matrix(0, 1), -0.5 * I, 1e-15));
  }

  TEST_CASE("four emitters at kΔz = π/2") {
    const auto c = make_array(4, 1.0, 1.0, 0.5 * kPi, 0.0, 0.0);
    const auto h = build_bare(c.emitters);
    const double g = 1e9;
    for (int m = 0; m < 4; ++m) {
      for (int n = 0; n < 4; ++n) {
        const int d = std::abs(m - n);
        const cplx want = d == 0 ? cplx(0, -g / 2) : d == 1 ? cplx(g / 2, 0) : d == 2 ? cplx(0, g / 2) : cplx(-g / 2, 0);
        CHECK(close(h.matrix(m, n), want, 1e-6));
      }
    }
  }

  TEST_CASE("single emitter with TLS uses g_s/2") {
    SystemConfig c;
    c.emitters.push_back({0.8, 0.2, 0.0, {}});
    c.tls = TlsParams{AngularFrequency::from_rad_per_s(5.0), AngularFrequency::from_rad_per_s(2.0), 0};
    const auto h = build(c);
    REQUIRE(h.dim() == 2);
    CHECK(h.matrix(0, 0) == cplx(0.0, -0.5));
    CHECK(h.matrix(1, 1) == cplx(5.0, -0.5));
    CHECK(h.matrix(0, 1) == cplx(1.0, 0.0));
    CHECK(h.matrix(1, 0) == cplx(1.0, 0.0));
    CHECK(h.basis[0] == BasisLabel{0, TlsState::zero});
    CHECK(h.basis[1] == BasisLabel{0, TlsState::one});

    c.tls->element = CouplingElement::full;
    CHECK(build(c).matrix(0, 1) == cplx(2.0, 0.0));
  }

  TEST_CASE("TLS couples only the chosen emitter") {
    auto c = make_array(2, 1.0, 0.9, 0.0, 5.0, 1.0, 0);
    const auto h = build(c);
    const double half_g = 0.5 * c.tls->g_s.rad_per_s();
    CHECK(h.matrix(0, 2) == cplx(half_g, 0.0));
    CHECK(h.matrix(1, 3) == cplx(0.0, 0.0));
    CHECK(h.matrix(0, 3) == cplx(0.0, 0.0));
    CHECK(h.basis[3] == BasisLabel{1, TlsState::one});
  }

  TEST_CASE("bad TLS index throws") {
    auto c = make_array(2, 1.0, 0.9, 0.0, 5.0, 1.0, 0);
    c.tls->coupled_emitter = 2;
    CHECK_THROWS(build(c));
    CHECK_THROWS(build_with_tls(c.emitters, *c.tls));
  }

  TEST_CASE("g_s = 0 gives decoupled sectors and TLS-0 block equals bare") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      auto c = random_config(rng, 1 + rng.index(6), false);
      c.tls->g_s = {};
      const auto h = build(c);
      const auto bare = build_bare(c.emitters);
      const auto n = bare.dim();
      CHECK(h.matrix.topLeftCorner(n, n) == bare.matrix);
      CHECK(h.matrix.topRightCorner(n, n).isZero(0.0));
      CHECK(h.matrix.bottomLeftCorner(n, n).isZero(0.0));
      const Eigen::MatrixXcd shifted =
          bare.matrix + c.tls->omega_q.rad_per_s() * Eigen::MatrixXcd::Identity(n, n);
      CHECK(h.matrix.bottomRightCorner(n, n) == shifted);
    }
  }

  TEST_CASE("decay matrix is PSD with the expected trace") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 1 + rng.index(8);
      const auto c = random_config(rng, n, false, i % 2 == 0);
      const auto h = build(c);
      const Eigen::MatrixXcd d = h.decay_matrix();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * h.matrix.norm());
      double total = 0.0;
      for (const auto& e : c.emitters) total += e.gamma_total();
      const double mult = c.tls ? 2.0 : 1.0;
      CHECK(d.trace().real() == doctest::Approx(0.5 * total * mult).epsilon(1e-12));
    }
  }

  TEST_CASE("v†Dv equals the directional emission rate for lossless arrays") {
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
      const auto c = random_config(rng, 1 + rng.index(6), true, false);
      const auto h = build_bare(c.emitters);
      Eigen::VectorXcd v = Eigen::VectorXcd::Random(h.dim());
      v.normalize();
      const double vdv = 2.0 * (v.adjoint() * h.decay_matrix() * v)(0, 0).real();
      CHECK(vdv == doctest::Approx(waveguide_emission_rate(c.emitters, v)).epsilon(1e-10));
    }
  }

  TEST_CASE("shifted subtracts δ on the diagonal only") {
    const auto c = make_array(2, 1.0, 0.9, 0.3, 5.0, 1.0);
    const auto h = build(c);
    const auto s = h.shifted(AngularFrequency::from_rad_per_s(2.5));
    CHECK(s.delta_applied);
    CHECK(s.matrix == h.matrix - 2.5 * Eigen::MatrixXcd::Identity(h.dim(), h.dim()));
  }
}
