// support.hpp - shared builders for the test binaries.

#pragma once

#include "wgqed/config.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace wgqed::test {

inline constexpr double kPi = std::numbers::pi;

/// n identical emitters, Γ_1D in ns⁻¹, spacing kΔz, TLS on `coupled`.
inline SystemConfig make_array(std::size_t n, double gamma_1d_ns, double beta, double kz_step, double omega_q_ghz,
                               double g_ghz, std::size_t coupled = 0) {
  SystemConfig c;
  for (std::size_t i = 0; i < n; ++i) {
    c.emitters.push_back(EmitterParams::with_beta(per_ns(gamma_1d_ns), beta, kz_step * static_cast<double>(i)));
  }
  c.tls = TlsParams{AngularFrequency::from_ghz(omega_q_ghz), AngularFrequency::from_ghz(g_ghz), coupled,
                    CouplingElement::half};
  return c;
}

/// Single emitter with all frequencies in units of Γ (Γ = 1e9 s⁻¹).
inline SystemConfig one_qd_units(double beta, double omega_q, double g_s) {
  constexpr double G = 1e9;
  SystemConfig c;
  c.emitters.push_back(EmitterParams::with_beta(beta * G, beta));
  c.tls = TlsParams{AngularFrequency::from_rad_per_s(omega_q * G), AngularFrequency::from_rad_per_s(g_s * G), 0,
                    CouplingElement::half};
  return c;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }

private:
  std::mt19937_64 gen_;
};

/// Random valid config: n emitters, sorted kz, rates in [0.2, 3] ns⁻¹, optional loss.
inline SystemConfig random_config(Rng& rng, std::size_t n, bool lossless, bool with_tls = true) {
  SystemConfig c;
  double kz = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    EmitterParams e;
    e.gamma_1d = per_ns(rng.uniform(0.2, 3.0));
    e.gamma_prime = lossless ? 0.0 : per_ns(rng.uniform(0.0, 0.5));
    e.kz = kz;
    e.delta_i = AngularFrequency::from_ghz(rng.uniform(-0.3, 0.3));
    kz += rng.uniform(0.0, 2.0 * kPi);
    c.emitters.push_back(e);
  }
  if (with_tls) {
    c.tls = TlsParams{AngularFrequency::from_ghz(rng.uniform(0.0, 5.0)), AngularFrequency::from_ghz(rng.uniform(0.0, 2.0)),
                      rng.index(n), CouplingElement::half};
  }
  return c;
}

}  // namespace wgqed::test
