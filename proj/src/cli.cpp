#include "wgqed/cli.hpp"

#include "wgqed/collective.hpp"
#include "wgqed/config.hpp"
#include "wgqed/csv.hpp"
#include "wgqed/errors.hpp"
#include "wgqed/hamiltonian.hpp"
#include "wgqed/optimize.hpp"
#include "wgqed/parallel.hpp"
#include "wgqed/protocol.hpp"
#include "wgqed/scattering.hpp"
#include "wgqed/scenarios.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace wgqed {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitExpectations = 3;

// Thrown to leave a subcommand with a specific exit code.
struct ExitRequest {
  int code;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Non-finite values become null. The JSON writer emits shortest round-trip digits.
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::pair<double, double> parse_range(const std::string& s, const char* flag) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument(std::string(flag) + " expects a:b");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(flag) + " expects numbers a:b, got " + s);
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file: " + path);
  f << content;
}

struct Context {
  std::ostream& out;
  std::string command_line;

  void envelope(const json& canonical_input, json payload, const std::optional<std::string>& out_path = {}) const {
    json env;
    env["tool_version"] = kToolVersion;
    env["command"] = command_line;
    env["config_hash"] = config_hash(canonical_input);
    env["timestamp"] = utc_timestamp();
    env["payload"] = std::move(payload);
    const std::string text = env.dump(2) + "\n";
    if (out_path) {
      write_file(*out_path, text);
    } else {
      out << text;
    }
  }
};

json canonical(const SystemConfig& c) { return config_to_json(c); }

SystemConfig load_valid(const std::string& path) {
  SystemConfig c = load_config(path);
  require_valid(c);
  return c;
}

json result_json(const ScatteringResult& r) {
  return json{{"delta_ghz", num(r.delta.to_ghz())},
              {"initial_tls_state", static_cast<int>(r.initial)},
              {"p_raman", num(r.p_raman)},
              {"p_raman_t", num(r.p_raman_t)},
              {"p_raman_r", num(r.p_raman_r)},
              {"p_loss", num(r.p_loss)},
              {"t_re", num(r.t_coeff.real())},
              {"t_im", num(r.t_coeff.imag())},
              {"r_re", num(r.r_coeff.real())},
              {"r_im", num(r.r_coeff.imag())},
              {"s00_t_re", num(r.s00_t.real())},
              {"s00_t_im", num(r.s00_t.imag())},
              {"s00_r_re", num(r.s00_r.real())},
              {"s00_r_im", num(r.s00_r.imag())},
              {"s10_t_re", num(r.s10_t.real())},
              {"s10_t_im", num(r.s10_t.imag())},
              {"s10_r_re", num(r.s10_r.real())},
              {"s10_r_im", num(r.s10_r.imag())},
              {"pivot_ratio", num(r.pivot_ratio)}};
}

json optimum_json(const OptimumReport& r) {
  return json{{"best_delta_ghz", num(r.best_delta.to_ghz())},
              {"best_Delta_ghz", num(r.best_Delta.to_ghz())},
              {"p_raman_at_opt", num(r.p_raman_at_opt)},
              {"closed_form_guess_ghz", num(r.closed_form_guess.to_ghz())},
              {"closed_form_guess_Delta_ghz", num(r.closed_form_guess_Delta.to_ghz())},
              {"p_raman_at_guess", num(r.p_raman_at_guess)},
              {"n_evaluations", r.n_evaluations},
              {"converged", r.converged},
              {"flags", r.flags}};
}

// ---- subcommands ----

struct HamiltonianArgs {
  std::string config;
  std::optional<double> delta_ghz;
  std::optional<std::string> out;
};

void cmd_hamiltonian(const Context& ctx, const HamiltonianArgs& a) {
  const auto cfg = load_valid(a.config);
  auto h = build(cfg);
  if (a.delta_ghz) h = h.shifted(AngularFrequency::from_ghz(*a.delta_ghz));
  json basis = json::array();
  for (const auto& b : h.basis) {
    basis.push_back({{"excited_emitter", b.excited_emitter}, {"tls_state", static_cast<int>(b.tls_state)}});
  }
  json rows = json::array();
  for (Eigen::Index i = 0; i < h.dim(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < h.dim(); ++k) row.push_back({num(h.matrix(i, k).real()), num(h.matrix(i, k).imag())});
    rows.push_back(row);
  }
  ctx.envelope(canonical(cfg),
               {{"units", "rad/s"},
                {"dim", h.dim()},
                {"delta_applied", h.delta_applied},
                {"basis", basis},
                {"matrix", rows}},
               a.out);
}

struct EigenmodesArgs {
  std::string config;
  std::optional<std::string> out;
  bool hermitian_part = false;
};

void cmd_eigenmodes(const Context& ctx, const EigenmodesArgs& a) {
  const auto cfg = load_valid(a.config);
  const auto analysis = a.hermitian_part ? hermitian_part_modes(cfg.emitters) : eigenmodes(cfg.emitters);
  CsvWriter csv({"mode_index", "energy_shift_ghz", "gamma_total_ns", "gamma_1d_ns", "gamma_prime_ns", "dark_flag"});
  for (std::size_t k = 0; k < analysis.modes.size(); ++k) {
    const auto& m = analysis.modes[k];
    csv.cell(k)
        .cell(m.energy_shift.to_ghz())
        .cell(to_per_ns(m.gamma_total))
        .cell(to_per_ns(m.gamma_1d))
        .cell(to_per_ns(m.gamma_prime))
        .cell(m.dark);
    csv.end_row();
  }
  if (!a.out) {
    ctx.out << csv.str();
    return;
  }
  write_file(*a.out, csv.str());
  ctx.envelope(canonical(cfg), {{"csv", *a.out},
                                {"modes", analysis.modes.size()},
                                {"degenerate", analysis.degenerate},
                                {"definition", a.hermitian_part ? "hermitian_part" : "non_hermitian_right"}});
}

struct SpectrumArgs {
  std::string config;
  double from_ghz = 0.0, to_ghz = 0.0;
  std::size_t points = 201;
  std::optional<std::string> out;
};

void cmd_spectrum(const Context& ctx, const SpectrumArgs& a) {
  const auto cfg = load_valid(a.config);
  const auto res = spectrum(cfg, AngularFrequency::from_ghz(a.from_ghz), AngularFrequency::from_ghz(a.to_ghz), a.points);
  CsvWriter csv({"delta_ghz", "t_re", "t_im", "r_re", "r_im", "abs_t2", "abs_r2", "p_raman", "p_raman_t", "p_raman_r",
                 "p_loss"});
  for (const auto& r : res) {
    csv.cell(r.delta.to_ghz())
        .cell(r.t_coeff.real())
        .cell(r.t_coeff.imag())
        .cell(r.r_coeff.real())
        .cell(r.r_coeff.imag())
        .cell(std::norm(r.t_coeff))
        .cell(std::norm(r.r_coeff))
        .cell(r.p_raman)
        .cell(r.p_raman_t)
        .cell(r.p_raman_r)
        .cell(r.p_loss);
    csv.end_row();
  }
  if (!a.out) {
    ctx.out << csv.str();
    return;
  }
  write_file(*a.out, csv.str());
  ctx.envelope(canonical(cfg), {{"csv", *a.out}, {"points", a.points}});
}

struct RamanArgs {
  std::string config;
  std::optional<double> delta_ghz;
  std::optional<std::string> out;
};

void cmd_raman(const Context& ctx, const RamanArgs& a) {
  auto cfg = load_valid(a.config);
  if (a.delta_ghz) cfg.delta = AngularFrequency::from_ghz(*a.delta_ghz);
  ctx.envelope(canonical(cfg), result_json(amplitudes(cfg, cfg.delta)), a.out);
}

struct OptimizeArgs {
  std::string config;
  std::string free = "delta";
  std::optional<std::string> delta_range, Delta_range;
  std::size_t budget = 0;
  std::optional<std::string> out;
};

OptimizeOptions optimize_options(const OptimizeArgs& a) {
  OptimizeOptions o;
  if (a.free == "delta") {
    o.free = FreeParameters::delta;
  } else if (a.free == "delta,Delta") {
    o.free = FreeParameters::delta_and_Delta;
  } else {
    throw std::invalid_argument("--free must be delta or delta,Delta");
  }
  o.budget = a.budget;
  if (a.delta_range) {
    const auto [lo, hi] = parse_range(*a.delta_range, "--delta-ghz-range");
    o.delta_bounds = Interval{AngularFrequency::from_ghz(lo), AngularFrequency::from_ghz(hi)};
  }
  if (a.Delta_range) {
    const auto [lo, hi] = parse_range(*a.Delta_range, "--Delta-ghz-range");
    o.Delta_bounds = Interval{AngularFrequency::from_ghz(lo), AngularFrequency::from_ghz(hi)};
  }
  return o;
}

void cmd_optimize(const Context& ctx, const OptimizeArgs& a) {
  const auto cfg = load_valid(a.config);
  const auto report = optimize_raman(cfg, optimize_options(a));
  ctx.envelope(canonical(cfg), optimum_json(report), a.out);
}

struct EntangleArgs {
  std::string config1, config2;
  std::string nbar_range = "0.001:1";
  std::size_t points = 31;
  bool log_spaced = false;
  double eta = 0.7;
  bool optimize = false;
  bool no_rayleigh = false;
  std::optional<std::string> out;
};

SystemConfig operating_point(SystemConfig c, bool optimize) {
  if (!optimize) return c;
  OptimizeOptions o;
  if (c.emitters.size() == 2) o.free = FreeParameters::delta_and_Delta;
  const auto r = optimize_raman(c, o);
  if (c.emitters.size() == 2) c = with_relative_detuning(c, r.best_Delta);
  c.delta = r.best_delta;
  return c;
}

void cmd_entangle(const Context& ctx, const EntangleArgs& a) {
  const auto c1 = operating_point(load_valid(a.config1), a.optimize);
  const auto c2 = operating_point(load_valid(a.config2), a.optimize);
  const auto [lo, hi] = parse_range(a.nbar_range, "--nbar-range");
  const Sweep sweep{"n_bar", lo, hi, a.points, a.log_spaced};
  const auto n1 = node_response(c1);
  const auto n2 = node_response(c2);
  ProtocolOptions opts;
  opts.rayleigh = !a.no_rayleigh;

  CsvWriter csv({"n_bar", "fidelity", "p_success", "infid_double", "infid_rayleigh", "truncation_mass"});
  std::size_t warnings = 0;
  for (double nb : sweep.values()) {
    const auto r = coherent_protocol(n1, n2, nb, a.eta, opts);
    if (r.truncation_warning) ++warnings;
    csv.cell(nb)
        .cell(r.fidelity)
        .cell(r.p_success)
        .cell(r.breakdown.double_flip)
        .cell(r.breakdown.rayleigh_dephasing)
        .cell(r.truncation_mass);
    csv.end_row();
  }
  const json input = json::array({canonical(c1), canonical(c2)});
  json payload{{"eta", num(a.eta)},
               {"q1", num(n1.q)},
               {"q2", num(n2.q)},
               {"d1", num(n1.d)},
               {"d2", num(n2.d)},
               {"target_state", "psi_plus"},
               {"p_success_definition", "eta*(p1+p2)/2, p_j = 1-exp(-n_bar*q_j)"},
               {"truncation_warnings", warnings}};
  if (!a.out) {
    ctx.out << csv.str();
    return;
  }
  write_file(*a.out, csv.str());
  payload["csv"] = *a.out;
  ctx.envelope(input, payload);
}

struct SweepArgs {
  bool list = false;
  std::optional<std::string> scenario;
  std::string out_dir = ".";
};

void cmd_sweep(const Context& ctx, const SweepArgs& a) {
  if (a.list) {
    for (const auto& n : builtin_scenario_names()) ctx.out << n << "\n";
    return;
  }
  if (!a.scenario) throw std::invalid_argument("sweep needs --list or --scenario");
  Scenario s;
  try {
    s = builtin_scenario(*a.scenario);
  } catch (const std::out_of_range&) {
    s = load_scenario(*a.scenario);
  }
  const auto result = run(s);
  std::filesystem::create_directories(a.out_dir);
  const auto base = std::filesystem::path(a.out_dir) / s.name;
  const std::string csv_path = base.string() + ".csv";
  const std::string report_path = base.string() + ".report.json";
  write_file(csv_path, result.csv);
  write_file(report_path, result.report_json().dump(2) + "\n");
  ctx.envelope(scenario_to_json(s), {{"csv", csv_path},
                                     {"report", report_path},
                                     {"all_passed", result.all_passed()},
                                     {"expectations", result.report.size()}});
  if (!result.all_passed()) throw ExitRequest{kExitExpectations};
}

}  // namespace

std::string config_hash(const nlohmann::json& canonical_json) {
  const std::string s = canonical_json.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Waveguide-QED transduction simulator", "wgqed"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (default: WGQED_THREADS or all cores)");

  HamiltonianArgs ha;
  auto* h = app.add_subcommand("hamiltonian", "Dump the effective Hamiltonian (rad/s) as JSON");
  h->add_option("--config", ha.config, "System config (JSON)")->required();
  h->add_option("--delta-ghz", ha.delta_ghz, "Apply -delta*I");
  h->add_option("--out", ha.out, "Write JSON here instead of stdout");

  EigenmodesArgs ea;
  auto* e = app.add_subcommand("eigenmodes", "Collective modes of the bare emitter array (CSV)");
  e->add_option("--config", ea.config, "System config (JSON)")->required();
  e->add_option("--out", ea.out, "CSV output path (default stdout)");
  e->add_flag("--hermitian-part", ea.hermitian_part, "Diagonalize (H+H^dagger)/2 instead (diagnostic)");

  SpectrumArgs sa;
  auto* sp = app.add_subcommand("spectrum", "Scattering spectrum on a uniform delta grid (CSV)");
  sp->add_option("--config", sa.config, "System config (JSON)")->required();
  sp->add_option("--from-ghz", sa.from_ghz, "Grid start")->required();
  sp->add_option("--to-ghz", sa.to_ghz, "Grid end")->required();
  sp->add_option("--points", sa.points, "Number of points (>= 2)");
  sp->add_option("--out", sa.out, "CSV output path (default stdout)");

  RamanArgs ra;
  auto* r = app.add_subcommand("raman", "Scattering amplitudes and Raman probability at one delta (JSON)");
  r->add_option("--config", ra.config, "System config (JSON)")->required();
  r->add_option("--delta-ghz", ra.delta_ghz, "Probe detuning (default: config delta_ghz)");
  r->add_option("--out", ra.out, "Write JSON here instead of stdout");

  OptimizeArgs oa;
  auto* o = app.add_subcommand("optimize", "Maximize the Raman probability (JSON)");
  o->add_option("--config", oa.config, "System config (JSON)")->required();
  o->add_option("--free", oa.free, "delta or delta,Delta");
  o->add_option("--delta-ghz-range", oa.delta_range, "Search bounds a:b for delta");
  o->add_option("--Delta-ghz-range", oa.Delta_range, "Search bounds a:b for Delta");
  o->add_option("--budget", oa.budget, "Evaluation budget (>= 100)");
  o->add_option("--out", oa.out, "Write JSON here instead of stdout");

  EntangleArgs na;
  auto* n = app.add_subcommand("entangle", "Heralded-entanglement fidelity vs mean photon number (CSV)");
  n->add_option("--config1", na.config1, "Node 1 config (JSON)")->required();
  n->add_option("--config2", na.config2, "Node 2 config (JSON)")->required();
  n->add_option("--nbar-range", na.nbar_range, "Range a:b of n_bar");
  n->add_option("--points", na.points, "Number of n_bar points");
  n->add_flag("--log", na.log_spaced, "Log-spaced n_bar grid");
  n->add_option("--eta", na.eta, "Detection efficiency");
  n->add_flag("--optimize", na.optimize, "Move each node to its Raman optimum first");
  n->add_flag("--no-rayleigh", na.no_rayleigh, "Disable Rayleigh dephasing");
  n->add_option("--out", na.out, "CSV output path (default stdout)");

  SweepArgs wa;
  auto* w = app.add_subcommand("sweep", "Run a scenario (built-in name or JSON file)");
  w->add_flag("--list", wa.list, "List built-in scenarios");
  w->add_option("--scenario", wa.scenario, "Scenario name or file");
  w->add_option("--out-dir", wa.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  std::string line;
  for (int i = 0; i < argc; ++i) line += (i ? " " : "") + std::string(argv[i]);
  const Context ctx{out, line};
  if (threads > 0) set_thread_count(threads);

  try {
    if (*h) cmd_hamiltonian(ctx, ha);
    if (*e) cmd_eigenmodes(ctx, ea);
    if (*sp) cmd_spectrum(ctx, sa);
    if (*r) cmd_raman(ctx, ra);
    if (*o) cmd_optimize(ctx, oa);
    if (*n) cmd_entangle(ctx, na);
    if (*w) cmd_sweep(ctx, wa);
  } catch (const ExitRequest& ex) {
    return ex.code;
  } catch (const NumericalError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& ex) {
    err << "error: invalid config\n" << ex.report().describe() << "\n";
    return kExitInvalid;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace wgqed
