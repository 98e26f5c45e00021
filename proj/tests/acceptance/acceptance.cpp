// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.

#include "wgqed/collective.hpp"
#include "wgqed/optimize.hpp"
#include "wgqed/parallel.hpp"
#include "wgqed/protocol.hpp"
#include "wgqed/scattering.hpp"
#include "wgqed/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wgqed;

namespace {

constexpr double kTol1 = 1e-4;       // relative, closed-form 1-QD optimum
constexpr double kTol2 = 0.05;       // δ distance to δ± in units of Γ
constexpr double kTol3 = 1e-10;      // extinction
constexpr double kTol4 = 1e-9;       // probability conservation
constexpr double kTol5 = 1e-5;       // ν and α₄
constexpr double kTol6 = 0.25;       // CPB table, relative
constexpr double kTol7Two = 0.10;    // 2-QD slope, relative
constexpr double kTol7Four = 0.20;   // 4-QD slope, relative
constexpr double kTol9Sat = 1e-6;    // bound saturation, relative
constexpr double kTol9Limit = 0.01;  // n̄ → 0 limit, relative
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemConfig one_qd(double beta, double wq, double g) {
  constexpr double G = 1e9;
  SystemConfig c;
  c.emitters.push_back(EmitterParams::with_beta(beta * G, beta));
  c.tls = TlsParams{AngularFrequency::from_rad_per_s(wq * G), AngularFrequency::from_rad_per_s(g * G), 0,
                    CouplingElement::half};
  return c;
}

struct Draw {
  double beta, wq, g;
};

std::vector<Draw> resonant_draws() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> b(0.5, 0.99), w(0.0, 50.0), g(0.1, 20.0);
  std::vector<Draw> out;
  while (out.size() < 200) {
    const Draw d{b(gen), w(gen), g(gen)};
    if (d.wq * d.wq + d.g * d.g >= 1.0) out.push_back(d);
  }
  return out;
}

// Criteria 1 and 2 share the draws.
void criteria_1_2() {
  double worst_rel = 0.0, worst_dist = 0.0;
  for (const auto& d : resonant_draws()) {
    const auto rep = optimize_raman(one_qd(d.beta, d.wq, d.g));
    const double want = d.beta * d.beta * d.g * d.g / (d.g * d.g + d.wq * d.wq);
    worst_rel = std::max(worst_rel, std::abs(rep.p_raman_at_opt - want) / want);
    const auto r = resonance_guess_1qd(AngularFrequency::from_rad_per_s(d.wq * 1e9),
                                       AngularFrequency::from_rad_per_s(d.g * 1e9), 1e9);
    const double x = rep.best_delta.rad_per_s();
    const double dist = std::min(std::abs(x - r.delta_plus.rad_per_s()), std::abs(x - r.delta_minus.rad_per_s())) / 1e9;
    worst_dist = std::max(worst_dist, dist);
  }
  report(1, "closed-form 1-QD optimum", {worst_rel <= kTol1, fmt("200 draws, max rel err %.3g (tol %g)", worst_rel, kTol1)});
  report(2, "resonance seeds", {worst_dist <= kTol2, fmt("max |δ - δ±| = %.3g Γ (tol %g Γ)", worst_dist, kTol2)});
}

void criterion_3() {
  double worst = 0.0;
  for (double beta : {0.5, 0.9, 0.98}) {
    auto c = one_qd(beta, 5.0, 0.0);
    const auto r = amplitudes(c, AngularFrequency{});
    worst = std::max(worst, std::abs(std::abs(r.t_coeff) - (1.0 - beta)));
  }
  report(3, "extinction", {worst <= kTol3, fmt("max ||t| - (1-β)| = %.3g (tol %g)", worst, kTol3)});
}

void criterion_4() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t n : {1u, 2u, 4u}) {
    for (int i = 0; i < 100; ++i) {
      SystemConfig c;
      double kz = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        c.emitters.push_back({per_ns(0.2 + 2.8 * u(gen)), 0.0, kz, AngularFrequency::from_ghz(0.6 * u(gen) - 0.3)});
        kz += 2.0 * kPi * u(gen);
      }
      c.tls = TlsParams{AngularFrequency::from_ghz(5.0 * u(gen)), AngularFrequency::from_ghz(3.0 * u(gen)),
                        static_cast<std::size_t>(u(gen) * static_cast<double>(n)) % n, CouplingElement::half};
      const auto r = amplitudes(c, AngularFrequency::from_ghz(-3.0 + 11.0 * u(gen)));
      const double total = std::norm(r.t_coeff) + std::norm(r.r_coeff) + r.p_raman_t + r.p_raman_r;
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  report(4, "probability conservation", {worst <= kTol4, fmt("N in {1,2,4}, 300 draws, max |sum - 1| = %.3g (tol %g)", worst, kTol4)});
}

void criterion_5() {
  std::vector<EmitterParams> e;
  for (int i = 0; i < 4; ++i) e.push_back({1e9, 0.0, 0.5 * kPi * i, {}});
  const auto a = eigenmodes(e);
  std::vector<const CollectiveMode*> dark;
  for (const auto& m : a.modes) {
    if (m.dark) dark.push_back(&m);
  }
  bool ok = dark.size() == 2;
  double nu = 0.0, frac = 0.0;
  if (ok) {
    nu = std::abs(dark[0]->energy_shift.rad_per_s() - dark[1]->energy_shift.rad_per_s()) / 1e9;
    frac = dark[0]->gamma_1d / 1e9;
    ok = std::abs(nu - 1.27202) <= kTol5 && std::abs(frac - (1.0 - 0.78615)) <= kTol5 &&
         std::abs(dark[1]->gamma_1d / 1e9 - frac) <= kTol5;
  }
  report(5, "4-QD eigenstructure",
         {ok, fmt("nu/Gamma_1D = %.8f, dark Gamma_1D fraction = %.8f (targets 1.27202, 0.21385, tol %g)", nu, frac,
                  kTol5)});
}

using Table = std::vector<std::map<std::string, std::string>>;

Table parse_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> head;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) head.push_back(cell);
  }
  Table t;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::string cell;
    std::map<std::string, std::string> row;
    for (const auto& col : head) {
      std::getline(r, cell, ',');
      row[col] = cell;
    }
    t.push_back(std::move(row));
  }
  return t;
}

double num(const std::map<std::string, std::string>& row, const std::string& col) { return std::stod(row.at(col)); }

void criterion_6(const ScenarioRun& cpb) {
  bool ok = true;
  std::string detail;
  for (const auto& r : cpb.report) {
    if (r.expectation.provenance != Provenance::paper) continue;
    ok = ok && std::abs(r.actual / r.expectation.value - 1.0) <= kTol6;
    detail += fmt("%s %.4g vs %.4g; ", r.expectation.case_label.c_str(), r.actual, r.expectation.value);
  }
  report(6, "CPB table", {ok, detail + fmt("tol %g rel", kTol6)});
}

void criterion_7() {
  const double x = 0.01;
  bool ok = true;
  std::string detail;
  for (double beta : {0.9, 0.98}) {
    auto two = builtin_scenario("fig3a_2qd").cases.at(0);
    two.config = apply_sweep_value(apply_sweep_value(two.config, "beta", beta), "g_s_ghz", x * 5.0);
    const double s2 = optimize_raman(two.config, two.optimizer.options()).p_raman_at_opt / (x * x);
    const double w2 = beta * beta / (1.0 - beta * beta);
    auto four = builtin_scenario("fig3a_4qd").cases.at(0);
    four.config = apply_sweep_value(apply_sweep_value(four.config, "beta", beta), "g_s_ghz", x * 5.0);
    const double s4 = optimize_raman(four.config, four.optimizer.options()).p_raman_at_opt / (x * x);
    const double w4 = approximate_p_raman(Approximation::four_qd_fit, beta, x) / (x * x);
    ok = ok && std::abs(s2 / w2 - 1.0) <= kTol7Two && std::abs(s4 / w4 - 1.0) <= kTol7Four;
    detail += fmt("beta=%g: 2QD %.4g vs %.4g, 4QD %.4g vs %.4g; ", beta, s2, w2, s4, w4);
  }
  report(7, "asymptotic slopes at g/omega=0.01", {ok, detail + fmt("tol %g / %g rel", kTol7Two, kTol7Four)});
}

void criterion_8(const ScenarioRun& r1, const ScenarioRun& r2, const ScenarioRun& r4) {
  const auto t1 = parse_csv(r1.csv), t2 = parse_csv(r2.csv), t4 = parse_csv(r4.csv);
  bool ok = t1.size() == t2.size() && t2.size() == t4.size();
  std::size_t order_bad = 0, approx_bad = 0;
  for (std::size_t k = 0; ok && k < t1.size(); ++k) {
    const double p1 = num(t1[k], "p_raman"), p2 = num(t2[k], "p_raman"), p4 = num(t4[k], "p_raman");
    if (!(p4 >= p2 && p2 >= p1)) ++order_bad;
    for (const auto* t : {&t1, &t2, &t4}) {
      const auto& row = (*t)[k];
      if (num(row, "g_over_omega") >= 0.1 && num(row, "p_raman") > num(row, "p_approx")) ++approx_bad;
    }
  }
  ok = ok && order_bad == 0 && approx_bad == 0;
  report(8, "enhancement ordering",
         {ok, fmt("%zu g points, ordering violations %zu, exact > approx at g/omega >= 0.1: %zu", t1.size(), order_bad,
                  approx_bad)});
}

void criterion_9() {
  const auto s = builtin_scenario("fig3b");
  const double eta = s.eta;
  std::vector<NodeResponse> nodes;
  for (const auto& c : s.cases) {
    const auto opt = optimize_raman(c.config, c.optimizer.options());
    auto at = c.optimizer.free == FreeParameters::delta_and_Delta ? with_relative_detuning(c.config, opt.best_Delta)
                                                                   : c.config;
    at.delta = opt.best_delta;
    nodes.push_back(node_response(at));
  }
  const auto grid = s.sweep->values();
  std::size_t violations = 0;
  double worst_sat = 0.0, worst_limit = 0.0, worst_f = 0.0;
  for (const auto& n : nodes) {
    for (double nb : grid) {
      const auto r = coherent_protocol(n, n, nb, eta);
      if (1.0 - r.fidelity < r.p_success / eta - 1e-9) ++violations;
      const auto off = coherent_protocol(n, n, nb, eta, {false});
      worst_sat = std::max(worst_sat, std::abs((1.0 - off.fidelity) / (off.p_success / eta) - 1.0));
    }
    const auto small = coherent_protocol(n, n, 1e-3, eta);
    worst_limit = std::max(worst_limit, std::abs(small.p_success / (eta * 1e-3 * n.q) - 1.0));
    worst_f = std::max(worst_f, 1.0 - small.fidelity);
  }
  // Infidelity at matched P_suc on a common grid.
  auto infid = [&](const NodeResponse& n, double ps) {
    const double nb = -std::log1p(-ps / eta) / n.q;
    return 1.0 - coherent_protocol(n, n, nb, eta).fidelity;
  };
  const double ps_max = eta * -std::expm1(-1.0 * std::min({nodes[0].q, nodes[1].q, nodes[2].q}));
  std::size_t order_bad = 0, four_vs_two = 0;
  const int np = 25;
  for (int k = 0; k < np; ++k) {
    const double ps = 1e-4 * std::pow(ps_max / 1e-4, k / double(np - 1));
    const double f1 = infid(nodes[0], ps), f2 = infid(nodes[1], ps), f4 = infid(nodes[2], ps);
    if (!(f2 < f1 && f4 < f1)) ++order_bad;
    if (f4 >= f2) ++four_vs_two;
  }
  const bool ok = violations == 0 && worst_sat <= kTol9Sat && worst_limit <= kTol9Limit && worst_f <= kTol9Limit &&
                  order_bad == 0;
  report(9, "protocol bound and ordering",
         {ok, fmt("bound violations %zu; saturation err %.3g (tol %g); n=1e-3: P_suc/(eta n q) err %.3g, 1-F %.3g (tol "
                  "%g); multi-QD below 1-QD at %d/%d matched P_suc points (4-QD above 2-QD at %zu, informational)",
                  violations, worst_sat, kTol9Sat, worst_limit, worst_f, kTol9Limit, np - int(order_bad), np,
                  four_vs_two)});
}

void criterion_10(const std::map<std::string, ScenarioRun>& base) {
  std::size_t mismatches = 0;
  for (std::size_t threads : {1u, 4u}) {
    set_thread_count(threads);
    for (const auto& [name, run0] : base) {
      if (run(builtin_scenario(name)).csv != run0.csv) ++mismatches;
    }
  }
  set_thread_count(0);
  report(10, "determinism",
         {mismatches == 0, fmt("%zu scenarios x {default, 1, 4} threads, %zu CSV mismatches", base.size(), mismatches)});
}

}  // namespace

int main() {
  criteria_1_2();
  criterion_3();
  criterion_4();
  criterion_5();

  std::map<std::string, ScenarioRun> runs;
  for (const auto& n : builtin_scenario_names()) runs.emplace(n, run(builtin_scenario(n)));

  criterion_6(runs.at("cpb_table"));
  criterion_7();
  criterion_8(runs.at("fig3a_1qd"), runs.at("fig3a_2qd"), runs.at("fig3a_4qd"));
  criterion_9();
  criterion_10(runs);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
