#include "wgqed/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wgqed {

EmitterParams EmitterParams::with_beta(double gamma_1d, double beta, double kz, AngularFrequency delta_i) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("with_beta: beta must be in (0, 1]");
  return EmitterParams{gamma_1d, gamma_1d * (1.0 - beta) / beta, kz, delta_i};
}

const char* to_string(ConfigErrorCode code) {
  switch (code) {
    case ConfigErrorCode::negative_rate: return "NEGATIVE_RATE";
    case ConfigErrorCode::bad_index: return "BAD_INDEX";
    case ConfigErrorCode::dimension_exceeded: return "DIMENSION_EXCEEDED";
    case ConfigErrorCode::nonmonotonic_positions: return "NONMONOTONIC_POSITIONS";
    case ConfigErrorCode::non_finite: return "NON_FINITE";
  }
  return "UNKNOWN";
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  for (const auto& v : violations) os << to_string(v.code) << ": " << v.field << " " << v.constraint << "\n";
  return os.str();
}

ConfigError::ConfigError(ValidationReport report)
    : std::runtime_error("invalid configuration:\n" + report.describe()), report_(std::move(report)) {}

ValidationReport validate(const SystemConfig& config) {
  ValidationReport rep;
  auto add = [&](ConfigErrorCode c, std::string field, std::string what) {
    rep.violations.push_back({c, std::move(field), std::move(what)});
  };

  const auto n = config.emitters.size();
  if (n < 1 || n > kMaxEmitters) {
    add(ConfigErrorCode::dimension_exceeded, "emitters", "count must be in [1, 16], got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = config.emitters[i];
    const std::string base = "emitters[" + std::to_string(i) + "]";
    if (!std::isfinite(e.gamma_1d) || !std::isfinite(e.gamma_prime) || !std::isfinite(e.kz)) {
      add(ConfigErrorCode::non_finite, base, "rates and kz must be finite");
      continue;
    }
    if (e.gamma_1d < 0.0) add(ConfigErrorCode::negative_rate, base + ".gamma_1d", "must be >= 0");
    if (e.gamma_prime < 0.0) add(ConfigErrorCode::negative_rate, base + ".gamma_prime", "must be >= 0");
    if (!(e.gamma_1d + e.gamma_prime > 0.0)) {
      add(ConfigErrorCode::negative_rate, base, "gamma_1d + gamma_prime must be > 0");
    }
    if (i > 0 && e.kz < config.emitters[i - 1].kz) {
      add(ConfigErrorCode::nonmonotonic_positions, base + ".kz", "positions must be non-decreasing");
    }
  }
  if (config.tls) {
    const auto& t = *config.tls;
    if (t.omega_q.rad_per_s() < 0.0) add(ConfigErrorCode::negative_rate, "tls.omega_q", "must be >= 0");
    if (t.g_s.rad_per_s() < 0.0) add(ConfigErrorCode::negative_rate, "tls.g_s", "must be >= 0");
    if (t.coupled_emitter >= n) {
      add(ConfigErrorCode::bad_index, "tls.coupled_emitter",
          "index " + std::to_string(t.coupled_emitter) + " out of range for " + std::to_string(n) + " emitters");
    }
  }
  return rep;
}

const SystemConfig& require_valid(const SystemConfig& config) {
  auto rep = validate(config);
  if (!rep.ok()) throw ConfigError(std::move(rep));
  return config;
}

SystemConfig config_from_json(const nlohmann::json& j) {
  SystemConfig cfg;
  for (const auto& e : j.at("emitters")) {
    EmitterParams p;
    p.gamma_1d = per_ns(e.at("gamma_1d_ns").get<double>());
    p.gamma_prime = per_ns(e.value("gamma_prime_ns", 0.0));
    p.kz = e.value("kz_over_pi", 0.0) * std::numbers::pi;
    p.delta_i = AngularFrequency::from_ghz(e.value("delta_ghz", 0.0));
    cfg.emitters.push_back(p);
  }
  if (j.contains("tls") && !j.at("tls").is_null()) {
    const auto& t = j.at("tls");
    TlsParams tls;
    tls.omega_q = AngularFrequency::from_ghz(t.at("omega_q_ghz").get<double>());
    tls.g_s = AngularFrequency::from_ghz(t.at("g_s_ghz").get<double>());
    // Read as signed so a negative index reports BAD_INDEX instead of wrapping.
    const auto idx = t.value("coupled_emitter", std::int64_t{0});
    tls.coupled_emitter = idx < 0 ? kMaxEmitters + 1 : static_cast<std::size_t>(idx);
    const auto elem = t.value("coupling_element", std::string("half"));
    if (elem == "half") {
      tls.element = CouplingElement::half;
    } else if (elem == "full") {
      tls.element = CouplingElement::full;
    } else {
      throw std::invalid_argument("tls.coupling_element must be \"half\" or \"full\"");
    }
    cfg.tls = tls;
  }
  cfg.delta = AngularFrequency::from_ghz(j.value("delta_ghz", 0.0));
  return cfg;
}

nlohmann::json config_to_json(const SystemConfig& cfg) {
  nlohmann::json j;
  j["emitters"] = nlohmann::json::array();
  for (const auto& e : cfg.emitters) {
    j["emitters"].push_back({{"gamma_1d_ns", to_per_ns(e.gamma_1d)},
                             {"gamma_prime_ns", to_per_ns(e.gamma_prime)},
                             {"kz_over_pi", e.kz / std::numbers::pi},
                             {"delta_ghz", e.delta_i.to_ghz()}});
  }
  if (cfg.tls) {
    j["tls"] = {{"omega_q_ghz", cfg.tls->omega_q.to_ghz()},
                {"g_s_ghz", cfg.tls->g_s.to_ghz()},
                {"coupled_emitter", cfg.tls->coupled_emitter},
                {"coupling_element", cfg.tls->element == CouplingElement::half ? "half" : "full"}};
  }
  j["delta_ghz"] = cfg.delta.to_ghz();
  return j;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error("cannot parse config file " + path + ": " + ex.what());
  }
  return config_from_json(j);
}

}  // namespace wgqed
