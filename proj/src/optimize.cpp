#include "wgqed/optimize.hpp"

#include "wgqed/collective.hpp"
#include "wgqed/errors.hpp"
#include "wgqed/hamiltonian.hpp"
#include "wgqed/parallel.hpp"
#include "wgqed/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgqed {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;
constexpr double kRelativeStepTolerance = 1e-10;
constexpr std::size_t kRefineCandidates = 6;
constexpr std::size_t kProfileGrid = 64;
constexpr std::size_t kProfileCandidates = 3;
// Values this close to the maximum are below the refinement tolerance and count as ties.
constexpr double kTieTolerance = 1e-9;

struct Point {
  double p = -1.0;
  double delta = 0.0;
  double Delta = 0.0;
};

bool better(const Point& a, const Point& b) {
  if (a.p != b.p) return a.p > b.p;
  if (std::abs(a.delta) != std::abs(b.delta)) return std::abs(a.delta) < std::abs(b.delta);
  return std::abs(a.Delta) < std::abs(b.Delta);
}

class Budget {
public:
  explicit Budget(std::size_t limit) : limit_(limit) {}
  bool take(std::size_t n) {
    if (used_ + n > limit_) {
      exhausted_ = true;
      return false;
    }
    used_ += n;
    return true;
  }
  std::size_t used() const { return used_; }
  bool exhausted() const { return exhausted_; }

private:
  std::size_t limit_;
  std::size_t used_ = 0;
  bool exhausted_ = false;
};

// Every evaluated point, in evaluation order.
class Recorder {
public:
  void note(const Point& pt) { points_.push_back(pt); }
  void note_floor(double p) { floor_ = std::max(floor_, p); }

  // Smallest |δ| (then |Δ|) among points within the tie tolerance of the maximum,
  // never below the floor (guess and grid values).
  Point select() const {
    Point top;
    for (const auto& pt : points_) {
      if (better(pt, top)) top = pt;
    }
    const double threshold = std::max(top.p - kTieTolerance * std::abs(top.p), floor_);
    Point pick = top;
    for (const auto& pt : points_) {
      if (pt.p < threshold) continue;
      const double a = std::abs(pt.delta), b = std::abs(pick.delta);
      if (a < b || (a == b && (std::abs(pt.Delta) < std::abs(pick.Delta) ||
                               (std::abs(pt.Delta) == std::abs(pick.Delta) && pt.p > pick.p)))) {
        pick = pt;
      }
    }
    return pick;
  }

private:
  std::vector<Point> points_;
  double floor_ = -1.0;
};

double max_gamma(const SystemConfig& c) {
  double g = 0.0;
  for (const auto& e : c.emitters) g = std::max(g, e.gamma_total());
  return g;
}

// TLS splitting ratio g_s/2 for the half element, so closed forms take g_eff = 2·element.
double effective_g(const TlsParams& tls) { return 2.0 * tls.coupling_matrix_element(); }

std::vector<double> eigen_real_parts(const SystemConfig& c) {
  const auto h = build(c);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.matrix, false);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) out.push_back(solver.eigenvalues()(k).real());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return g;
}

// Maximizes p_raman over δ ∈ [lo, hi] for a fixed Hamiltonian.
class DeltaSearch {
public:
  DeltaSearch(const SystemConfig& config, kernels::Backend backend, Budget& budget, Recorder& recorder, double Delta)
      : problem_(config, TlsState::zero, backend), budget_(budget), recorder_(recorder), Delta_(Delta) {}

  std::vector<double> evaluate(const std::vector<double>& xs) {
    if (!budget_.take(xs.size())) return {};
    std::vector<double> p(xs.size());
    parallel_for(xs.size(), 256, [&](std::size_t begin, std::size_t end) {
      const auto part = problem_.raman_probabilities(std::span<const double>(xs.data() + begin, end - begin));
      std::copy(part.begin(), part.end(), p.begin() + static_cast<std::ptrdiff_t>(begin));
    });
    for (std::size_t k = 0; k < xs.size(); ++k) note({p[k], xs[k], Delta_});
    return p;
  }

  std::optional<double> evaluate(double x) {
    const auto p = evaluate(std::vector<double>{x});
    if (p.empty()) return std::nullopt;
    return p.front();
  }

  // Golden section on [a, b]; false if the budget ran out first.
  bool golden(double a, double b) {
    const double tol = kRelativeStepTolerance * (b - a);
    double c = b - kGoldenRatio * (b - a);
    double d = a + kGoldenRatio * (b - a);
    auto fc = evaluate(c);
    auto fd = evaluate(d);
    if (!fc || !fd) return false;
    while (b - a > tol) {
      if (*fc >= *fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kGoldenRatio * (b - a);
        fc = evaluate(c);
        if (!fc) return false;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kGoldenRatio * (b - a);
        fd = evaluate(d);
        if (!fd) return false;
      }
    }
    return true;
  }

  // Grid + seeds, then golden section around the best few local maxima.
  bool run(double lo, double hi, std::size_t n_grid, const std::vector<double>& seeds, std::size_t n_refine) {
    const auto grid = uniform_grid(lo, hi, n_grid);
    const auto pg = evaluate(grid);
    if (pg.empty()) return false;
    for (double v : pg) recorder_.note_floor(v);
    const double h = (hi - lo) / static_cast<double>(n_grid - 1);

    std::vector<Point> cands;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const bool left = k == 0 || pg[k] >= pg[k - 1];
      const bool right = k + 1 == grid.size() || pg[k] >= pg[k + 1];
      if (left && right) cands.push_back({pg[k], grid[k], Delta_});
    }
    std::vector<double> in_bounds;
    for (double s : seeds) {
      if (s >= lo && s <= hi) in_bounds.push_back(s);
    }
    if (!in_bounds.empty()) {
      const auto ps = evaluate(in_bounds);
      if (ps.empty()) return false;
      for (std::size_t k = 0; k < in_bounds.size(); ++k) cands.push_back({ps[k], in_bounds[k], Delta_});
    }
    std::sort(cands.begin(), cands.end(), better);
    if (cands.size() > n_refine) cands.resize(n_refine);
    for (const auto& c : cands) {
      if (!golden(std::max(lo, c.delta - h), std::min(hi, c.delta + h))) return false;
    }
    return true;
  }

  double p_at(double x) const { return problem_.raman_probabilities(std::span<const double>(&x, 1)).front(); }
  const Point& best() const { return best_; }

private:
  void note(const Point& pt) {
    recorder_.note(pt);
    if (better(pt, best_)) best_ = pt;
  }

  ScatteringProblem problem_;
  Budget& budget_;
  Recorder& recorder_;
  double Delta_;
  Point best_;
};

struct Guess {
  double delta = 0.0;
  double Delta = 0.0;
  std::vector<double> seeds;
};

Guess closed_form_guess(const SystemConfig& c, bool free_Delta, std::vector<std::string>& flags) {
  Guess g;
  if (!c.tls) return g;
  const auto& tls = *c.tls;
  const double wq = tls.omega_q.rad_per_s();
  const double mean_detuning = [&] {
    double s = 0.0;
    for (const auto& e : c.emitters) s += e.delta_i.rad_per_s();
    return s / static_cast<double>(c.emitters.size());
  }();

  if (c.emitters.size() == 1) {
    const auto& e = c.emitters.front();
    const auto r = resonance_guess_1qd(tls.omega_q, AngularFrequency::from_rad_per_s(effective_g(tls)), e.gamma_total());
    if (r.overdamped) flags.emplace_back("OVERDAMPED");
    const double dp = r.delta_plus.rad_per_s() + e.delta_i.rad_per_s();
    const double dm = r.delta_minus.rad_per_s() + e.delta_i.rad_per_s();
    const ScatteringProblem prob(c);
    const double pp = prob.at(AngularFrequency::from_rad_per_s(dp)).p_raman;
    const double pm = prob.at(AngularFrequency::from_rad_per_s(dm)).p_raman;
    g.delta = better({pp, dp, 0.0}, {pm, dm, 0.0}) ? dp : dm;
    g.seeds = {dp, dm};
  } else if (c.emitters.size() == 2 && wq > 0.0) {
    SystemConfig adjusted = c;
    adjusted.tls->g_s = AngularFrequency::from_rad_per_s(effective_g(tls));
    g.delta = resonance_guess_2qd(adjusted).rad_per_s() + mean_detuning;
    g.seeds = {g.delta};
    if (free_Delta) {
      const auto& e = c.emitters.front();
      try {
        g.Delta = solve_delta_for_gamma_a(c.emitters[0], c.emitters[1], e.beta() * (1.0 - e.beta()) * e.gamma_total())
                      .rad_per_s();
      } catch (const NumericalError&) {
        flags.emplace_back("UNREACHABLE_TARGET");
      }
    }
  } else {
    g.delta = 0.5 * wq + mean_detuning;
    g.seeds = {g.delta};
  }
  return g;
}

}  // namespace

bool OptimumReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

ResonanceGuess1qd resonance_guess_1qd(AngularFrequency omega_q, AngularFrequency g_s, double gamma) {
  const double w = omega_q.rad_per_s();
  const double g = g_s.rad_per_s();
  const double radicand = w * w + g * g - gamma * gamma;
  ResonanceGuess1qd out;
  if (radicand < 0.0) {
    out.overdamped = true;
    out.delta_plus = out.delta_minus = AngularFrequency::from_rad_per_s(0.5 * w);
    return out;
  }
  const double root = std::sqrt(radicand);
  out.delta_plus = AngularFrequency::from_rad_per_s(0.5 * (w + root));
  out.delta_minus = AngularFrequency::from_rad_per_s(0.5 * (w - root));
  return out;
}

AngularFrequency resonance_guess_2qd(const SystemConfig& config) {
  if (config.emitters.size() != 2 || !config.tls) {
    throw std::invalid_argument("resonance_guess_2qd: needs two emitters and a TLS");
  }
  const double wq = config.tls->omega_q.rad_per_s();
  if (!(wq > 0.0)) throw std::invalid_argument("resonance_guess_2qd: omega_q must be > 0");
  const double g = config.tls->g_s.rad_per_s();
  const auto& e1 = config.emitters[0];
  const auto& e2 = config.emitters[1];
  const double kdz = std::abs(e2.kz - e1.kz);
  return AngularFrequency::from_rad_per_s(wq - std::sqrt(e1.gamma_1d * e2.gamma_1d) * std::sin(kdz) / 2.0 +
                                          g * g / (4.0 * wq));
}

SystemConfig with_relative_detuning(const SystemConfig& config, AngularFrequency Delta) {
  if (config.emitters.size() != 2) throw std::invalid_argument("with_relative_detuning: needs two emitters");
  SystemConfig c = config;
  c.emitters[0].delta_i = c.emitters[0].delta_i + 0.5 * Delta;
  c.emitters[1].delta_i = c.emitters[1].delta_i - 0.5 * Delta;
  return c;
}

OptimumReport optimize_raman(const SystemConfig& config, const OptimizeOptions& options) {
  require_valid(config);
  const bool two_d = options.free == FreeParameters::delta_and_Delta;
  if (two_d && config.emitters.size() != 2) {
    throw std::invalid_argument("optimize_raman: Delta is only free for two emitters");
  }
  const std::size_t budget_limit = options.budget == 0 ? (two_d ? 60000 : 4000) : options.budget;
  if (budget_limit < 100) throw std::invalid_argument("optimize_raman: budget must be >= 100 evaluations");

  const double gmax = max_gamma(config);
  double Delta_lo = 0.0, Delta_hi = 10.0 * gmax;
  if (options.Delta_bounds) {
    Delta_lo = options.Delta_bounds->lo.rad_per_s();
    Delta_hi = options.Delta_bounds->hi.rad_per_s();
  }
  double lo = 0.0, hi = 0.0;
  if (options.delta_bounds) {
    lo = options.delta_bounds->lo.rad_per_s();
    hi = options.delta_bounds->hi.rad_per_s();
  } else {
    const auto ev = eigen_real_parts(config);
    const double spread = two_d ? 0.5 * std::max(std::abs(Delta_lo), std::abs(Delta_hi)) : 0.0;
    lo = ev.front() - 10.0 * gmax - spread;
    hi = ev.back() + 10.0 * gmax + spread;
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo) || (two_d && !(Delta_hi >= Delta_lo)) ||
      !std::isfinite(Delta_lo) || !std::isfinite(Delta_hi)) {
    throw std::invalid_argument("optimize_raman: bounds must be finite and non-empty");
  }

  OptimumReport report;
  const Guess guess = closed_form_guess(config, two_d, report.flags);
  report.closed_form_guess = AngularFrequency::from_rad_per_s(guess.delta);
  report.closed_form_guess_Delta = AngularFrequency::from_rad_per_s(guess.Delta);

  Budget budget(budget_limit);
  Recorder recorder;

  if (!two_d) {
    DeltaSearch search(config, options.backend, budget, recorder, 0.0);
    report.p_raman_at_guess = search.p_at(guess.delta);
    recorder.note_floor(report.p_raman_at_guess);
    std::vector<double> seeds = guess.seeds;
    for (double ev : eigen_real_parts(config)) seeds.push_back(ev);
    const std::size_t n_grid = std::clamp<std::size_t>(budget_limit / 4, 64, 4096);
    report.converged = search.run(lo, hi, n_grid, seeds, kRefineCandidates);
    recorder.note({report.p_raman_at_guess, guess.delta, 0.0});
    const Point pick = recorder.select();
    report.best_delta = AngularFrequency::from_rad_per_s(pick.delta);
    report.p_raman_at_opt = std::max(pick.p, 0.0);
    report.n_evaluations = budget.used();
    if (!report.converged) report.flags.emplace_back("BUDGET_EXHAUSTED");
    return report;
  }

  // Profile over Δ: P(Δ) = max over δ, each profile point a 1-D search.
  Point best;
  bool ok = true;
  auto profile = [&](double Delta) -> std::optional<Point> {
    const auto c = with_relative_detuning(config, AngularFrequency::from_rad_per_s(Delta));
    DeltaSearch search(c, options.backend, budget, recorder, Delta);
    std::vector<double> seeds = guess.seeds;
    for (double ev : eigen_real_parts(c)) seeds.push_back(ev);
    if (best.p >= 0.0) seeds.push_back(best.delta);
    const bool done = search.run(lo, hi, kProfileGrid, seeds, kProfileCandidates);
    if (search.best().p >= 0.0 && better(search.best(), best)) best = search.best();
    if (!done) {
      ok = false;
      return std::nullopt;
    }
    return search.best();
  };

  {
    const auto gc = with_relative_detuning(config, AngularFrequency::from_rad_per_s(guess.Delta));
    report.p_raman_at_guess = ScatteringProblem(gc, TlsState::zero, options.backend).at(report.closed_form_guess).p_raman;
  }

  const std::size_t n_rows = std::clamp<std::size_t>(budget_limit / 1000, 16, 256);
  const auto rows = Delta_hi > Delta_lo ? uniform_grid(Delta_lo, Delta_hi, n_rows) : std::vector<double>{Delta_lo};
  std::vector<Point> row_best;
  for (double D : rows) {
    const auto r = profile(D);
    if (!r) break;
    row_best.push_back(*r);
  }
  if (ok) {
    for (double D : {guess.Delta, 0.0}) {
      if (D < Delta_lo || D > Delta_hi) continue;
      const auto r = profile(D);
      if (!r) break;
      row_best.push_back(*r);
    }
  }
  // Evaluate the guess point itself so the optimum never falls below it.
  if (ok && guess.Delta >= Delta_lo && guess.Delta <= Delta_hi && report.p_raman_at_guess >= 0.0) {
    const Point gp{report.p_raman_at_guess, guess.delta, guess.Delta};
    recorder.note(gp);
    recorder.note_floor(gp.p);
    if (better(gp, best)) best = gp;
  }

  if (ok && rows.size() > 1) {
    const double h = (Delta_hi - Delta_lo) / static_cast<double>(rows.size() - 1);
    std::vector<Point> cands;
    for (std::size_t k = 0; k < rows.size() && k < row_best.size(); ++k) {
      const bool left = k == 0 || row_best[k].p >= row_best[k - 1].p;
      const bool right = k + 1 == rows.size() || row_best[k].p >= row_best[k + 1].p;
      if (left && right) cands.push_back(row_best[k]);
    }
    for (std::size_t k = rows.size(); k < row_best.size(); ++k) cands.push_back(row_best[k]);
    std::sort(cands.begin(), cands.end(), better);
    if (cands.size() > kProfileCandidates) cands.resize(kProfileCandidates);

    for (const auto& c : cands) {
      if (!ok) break;
      double a = std::max(Delta_lo, c.Delta - h);
      double b = std::min(Delta_hi, c.Delta + h);
      const double tol = kRelativeStepTolerance * (b - a);
      double x1 = b - kGoldenRatio * (b - a);
      double x2 = a + kGoldenRatio * (b - a);
      auto f1 = profile(x1);
      auto f2 = profile(x2);
      while (ok && f1 && f2 && b - a > tol) {
        if (!better(*f2, *f1)) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - kGoldenRatio * (b - a);
          f1 = profile(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + kGoldenRatio * (b - a);
          f2 = profile(x2);
        }
      }
    }
  }

  const Point pick = recorder.select();
  report.best_delta = AngularFrequency::from_rad_per_s(pick.delta);
  report.best_Delta = AngularFrequency::from_rad_per_s(pick.Delta);
  report.p_raman_at_opt = std::max(pick.p, 0.0);
  report.n_evaluations = budget.used();
  report.converged = ok;
  if (!ok) report.flags.emplace_back("BUDGET_EXHAUSTED");
  return report;
}

}  // namespace wgqed
