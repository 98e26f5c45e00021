// config.hpp - validated system configuration shared by all modules.

#pragma once

#include "wgqed/units.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgqed {

inline constexpr std::size_t kMaxEmitters = 16;

struct EmitterParams {
  double gamma_1d = 0.0;     // Γ_{i,1D}, 1/s
  double gamma_prime = 0.0;  // γ'_i, 1/s
  double kz = 0.0;           // k·z_i, radians
  AngularFrequency delta_i;  // detuning from the array's mean transition frequency

  double gamma_total() const { return gamma_1d + gamma_prime; }
  double beta() const { return gamma_1d / (gamma_1d + gamma_prime); }

  /// Emitter with waveguide rate Γ_1D and coupling efficiency β.
  static EmitterParams with_beta(double gamma_1d, double beta, double kz = 0.0,
                                 AngularFrequency delta_i = {});
};

/// How the Stark coupling enters the TLS-flip matrix element.
enum class CouplingElement {
  half,  // g_s/2 (default; reproduces the single-emitter resonance conditions)
  full,  // g_s (literal Pauli-X normalization; for labeled comparisons only)
};

struct TlsParams {
  AngularFrequency omega_q;
  AngularFrequency g_s;
  std::size_t coupled_emitter = 0;
  CouplingElement element = CouplingElement::half;

  double coupling_matrix_element() const {
    return element == CouplingElement::half ? 0.5 * g_s.rad_per_s() : g_s.rad_per_s();
  }
};

struct SystemConfig {
  std::vector<EmitterParams> emitters;
  std::optional<TlsParams> tls;
  AngularFrequency delta;  // probe detuning from the mean emitter frequency

  std::size_t size() const { return emitters.size(); }
};

enum class ConfigErrorCode { negative_rate, bad_index, dimension_exceeded, nonmonotonic_positions, non_finite };

const char* to_string(ConfigErrorCode code);

struct Violation {
  ConfigErrorCode code;
  std::string field;
  std::string constraint;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ValidationReport validate(const SystemConfig& config);

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

private:
  ValidationReport report_;
};

/// Returns the config unchanged, or throws ConfigError listing every violation.
const SystemConfig& require_valid(const SystemConfig& config);

// JSON schema: emitters[].{gamma_1d_ns, gamma_prime_ns, kz_over_pi, delta_ghz},
// tls.{omega_q_ghz, g_s_ghz, coupled_emitter[, coupling_element]}, delta_ghz.
// All *_ghz values are ordinary frequencies (multiplied by 2π on load).
SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& config);
SystemConfig load_config(const std::string& path);

}  // namespace wgqed
