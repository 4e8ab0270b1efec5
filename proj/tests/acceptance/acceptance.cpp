// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                run all criteria
//   acceptance --criterion N  run criterion N only
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fkratchet/bounds.hpp"
#include "fkratchet/chain.hpp"
#include "fkratchet/harness.hpp"
#include "fkratchet/measure.hpp"
#include "fkratchet/numtheory.hpp"
#include "support/oracles.hpp"

using namespace fkr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ModelSpec model_at(double tau) {
  ModelSpec m = default_model();
  m.pulse.tau = tau;
  return m;
}

// h(rho k + a), h(x) = x + e sin(2 pi x) / (2 pi): rotationally ordered for |e| < 1.
ChainState random_ordered(Winding w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a_dist(0.0, 1.0), e_dist(-0.9, 0.9);
  const double a = a_dist(rng), e = e_dist(rng);
  std::vector<double> u;
  for (std::int64_t k = 0; k < w.q; ++k) {
    const double x = w.line(k) + a;
    u.push_back(x + e * std::sin(2 * std::numbers::pi * x) / (2 * std::numbers::pi));
  }
  return ChainState(u, w);
}

struct Run {
  std::string label;
  LemmaReport report;
};

// 20 post-transient states over five (rho, tau) cells, four random starts each.
const std::vector<Run>& random_state_runs() {
  static const std::vector<Run> runs = [] {
    const std::vector<std::pair<Rational, double>> cells = {
        {{5, 8}, 1.0}, {{8, 13}, 1.0}, {{5, 8}, 10.0}, {{13, 21}, 10.0}, {{5, 8}, 100.0}};
    RunSettings s;
    std::mt19937_64 rng(20240611);
    std::vector<Run> out;
    for (const auto& [rho, tau] : cells) {
      const ModelSpec m = model_at(tau);
      for (int i = 0; i < 4; ++i) {
        const ChainState start = random_ordered(winding_of(rho), rng);
        const ChainState relaxed = relax(start, 20, m, s);
        out.push_back({rho.str() + " tau=" + num(tau) + " #" + std::to_string(i),
                       verify_cycle(relaxed, m, s)});
      }
    }
    return out;
  }();
  return runs;
}

const Run& default_run() {
  static const Run run = [] {
    RunSettings s;
    return Run{"8/13 tau=50", verify_lemmas({8, 13}, model_at(50.0), s)};
  }();
  return run;
}

// Aggregates one named check across runs.
Outcome check_across(const std::vector<const Run*>& runs, const std::string& name) {
  Outcome o{true, ""};
  double worst = INFINITY;
  int evaluations = 0;
  for (const Run* r : runs) {
    const LemmaCheck* c = r->report.find(name);
    if (!c) return {false, "missing check " + name};
    worst = std::min(worst, c->worst_margin);
    evaluations += c->evaluations;
    if (!c->passed && o.pass) {
      o.pass = false;
      o.detail = "first failure in " + r->label + ": " + c->first_failure + "; ";
    }
  }
  o.detail += name + " over " + std::to_string(runs.size()) + " runs, " +
              std::to_string(evaluations) + " evaluations, worst margin " + num(worst);
  return o;
}

std::vector<const Run*> random_runs() {
  std::vector<const Run*> out;
  for (const auto& r : random_state_runs()) out.push_back(&r);
  return out;
}

Outcome c1() { return check_across(random_runs(), "zero_offphase_drift"); }

Outcome c2() { return check_across(random_runs(), "width_decay"); }

Outcome c3() {
  Outcome o{true, ""};
  const Run& r = default_run();
  for (const char* name : {"poincare_inequality", "force_inequality", "energy_upper", "energy_lower"}) {
    const LemmaCheck* c = r.report.find(name);
    o.detail += std::string(o.detail.empty() ? "" : "; ") + name + " margin " + num(c->worst_margin);
    if (!c->passed) {
      o.pass = false;
      o.detail += " FAILED (" + c->first_failure + ")";
    }
  }
  return o;
}

Outcome c4() {
  auto runs = random_runs();
  runs.push_back(&default_run());
  return check_across(runs, "energy_nonincreasing");
}

Outcome c5() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_real_distribution<double> pos(0.0, 1.0), w(0.05, 1.0);
  auto random_measure = [&] {
    const int n = size(rng);
    std::vector<CircleAtom> atoms;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      atoms.push_back({pos(rng), w(rng)});
      total += atoms.back().weight;
    }
    for (auto& a : atoms) a.weight /= total;
    return CircleMeasure(atoms);
  };
  double worst_lp = 0.0, worst_q = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto mu = random_measure(), nu = random_measure();
    worst_lp = std::max(worst_lp, std::abs(w1_circle(mu, nu) - oracle::w1_circle_lp(mu, nu)));
  }
  // Midpoint grid with 4 points per atom spacing: the LP value is exactly 1/(4q).
  for (int q = 1; q <= 50; ++q) {
    const auto atoms = CircleMeasure::equally_spaced(q);
    const double exact = 1.0 / (4.0 * q);
    const double lp = oracle::w1_circle_lp(atoms, oracle::midpoint_lebesgue(4 * q));
    worst_q = std::max({worst_q, std::abs(w1_to_lebesgue(atoms) - exact), std::abs(lp - exact)});
  }
  return {worst_lp <= 1e-9 && worst_q <= 1e-9,
          "200 random instances, max |closed form - LP| = " + num(worst_lp) +
              "; q = 1..50 equally spaced, max deviation from 1/(4q) = " + num(worst_q)};
}

Outcome c6() {
  auto runs = random_runs();
  runs.push_back(&default_run());
  return check_across(runs, "circle_distance");
}

RunSettings sweep_settings() {
  RunSettings s;
  s.transient_periods = 20;
  s.window = 16;
  s.max_periods = 96;
  return s;
}

const std::vector<double>& sweep_taus() {
  static const std::vector<double> taus = log_grid(1.0, 1000.0, 8);
  return taus;
}

Outcome c7() {
  const RunSettings s = sweep_settings();
  const auto res = sweep({Rational{8, 13}, Rational{13, 21}, Rational{21, 34}, Rational{34, 55}},
                         sweep_taus(), default_model(), s);
  int informative = 0, unconverged = 0;
  Outcome o{true, ""};
  for (const auto& row : res.rows) {
    if (!row.speed.converged) ++unconverged;
    if (row.bound.vacuous) continue;
    ++informative;
    if (!row.speed.converged || row.speed.v < row.bound.theorem1 - 1e-6) {
      o.pass = false;
      o.detail += "violated at " + row.rho.str() + " tau=" + num(row.tau) + "; ";
    }
  }
  double best = -INFINITY;
  for (const auto& row : res.rows) best = std::max(best, row.bound.theorem1);
  o.detail += std::to_string(res.rows.size()) + " cells, " + std::to_string(informative) +
              " with a positive bound (largest bound " + num(best) + "), " +
              std::to_string(unconverged) + " unconverged";
  return o;
}

Outcome c8() {
  Outcome o{true, ""};
  RunSettings s;
  // Integer spacing: no transport, and the bound never becomes positive.
  double worst_v = 0.0;
  for (const Rational rho : {Rational{1, 1}, Rational{2, 1}}) {
    for (double tau : {1.0, 10.0}) {
      const auto est = measure_speed(rho, model_at(tau), s);
      worst_v = std::max(worst_v, std::abs(est.v));
      if (!est.converged || std::abs(est.v) > 1e-6) o.pass = false;
    }
  }
  const double c = c_rho(2.0, 2.0);
  const auto integer_seq = continued_fraction(Rational{3, 1});
  double worst_bound = -INFINITY;
  for (int ia = 1; ia < 10; ++ia) {
    const double alpha = 0.05 * ia;
    for (double tau : log_grid(1e-2, 1e16, 37)) {
      for (double beta : {0.0, 1e-6, 1e-3, 0.1}) {
        worst_bound = std::max(worst_bound,
                               theorem1_bound({alpha, beta, tau, gamma_rho_tau(integer_seq, {c, tau}), c, 0.0}));
      }
    }
  }
  if (!(worst_bound < 0.0)) o.pass = false;
  o.detail = "integer rho: max |v| = " + num(worst_v) + ", max bound " + num(worst_bound);

  // Threshold: denominators at or beyond ceil(3 / alpha^2) reach a positive bound.
  const ModelSpec m = default_model();
  const auto base = evaluate_bound(Rational{8, 13}, m.pulse.tau, m, s);
  if (!base.asymmetry) return {false, o.detail + "; default model has no asymmetry"};
  const double alpha = base.asymmetry->alpha;
  const auto threshold = static_cast<std::int64_t>(std::ceil(3.0 / (alpha * alpha)));
  const auto taus = log_grid(1e2, 1e20, 73);
  int tested = 0;
  for (const auto& conv : continued_fraction(QuadraticIrrational::golden_mean, 64, 1597).convergents) {
    if (conv.q < threshold) continue;
    ++tested;
    bool found = false;
    for (double tau : taus) {
      if (evaluate_bound(conv, tau, m, s).theorem1 > 0.0) {
        found = true;
        break;
      }
    }
    if (!found) {
      o.pass = false;
      o.detail += "; no positive bound for " + conv.str();
    }
  }
  o.detail += "; threshold q >= " + std::to_string(threshold) + " (alpha " + num(alpha) + "), " +
              std::to_string(tested) + " approximants tested";

  int golden_cells = 0;
  for (double tau : taus) {
    const auto b = evaluate_bound(QuadraticIrrational::golden_mean, tau, m, s);
    if (!b.golden) continue;
    ++golden_cells;
    if (!(b.golden->value <= b.theorem1 + 1e-12)) {
      o.pass = false;
      o.detail += "; golden bound exceeds the general bound at tau=" + num(tau);
    }
  }
  o.detail += "; golden-mean bound compared at " + std::to_string(golden_cells) + " tau values";
  if (golden_cells == 0) o.pass = false;
  return o;
}

Outcome c9() {
  Outcome o{true, ""};
  const auto seq = continued_fraction(QuadraticIrrational::golden_mean, 64, 233);
  std::vector<std::int64_t> fib = {1, 1};
  while (fib.back() < 233) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  std::vector<std::int64_t> got;
  for (const auto& c : seq.convergents) got.push_back(c.q);
  if (got != fib) {
    o.pass = false;
    o.detail += "Fibonacci mismatch; ";
  }
  const double levy_err =
      std::abs(levy_constant() - std::exp(std::numbers::pi * std::numbers::pi / (12.0 * std::log(2.0))));
  if (levy_err > 1e-12) o.pass = false;
  const double c = c_rho(2.0, 2.0), tau = 1e8;
  const double g_int = gamma_rho_tau(continued_fraction(Rational{3, 1}), {c, tau});
  const double g_rat = gamma_rho_tau(continued_fraction(Rational{8, 13}), {c, tau});
  const double e_int = std::abs(g_int / std::sqrt(3.0) - 1.0);
  const double e_rat = std::abs(g_rat / (std::sqrt(3.0) / std::sqrt(13.0)) - 1.0);
  if (e_int > 0.01 || e_rat > 0.01) o.pass = false;
  o.detail += "denominators through 233: " + std::to_string(got.size()) + " match; Levy error " +
              num(levy_err) + "; gamma at tau=1e8: integer rel. error " + num(e_int) +
              ", q=13 rel. error " + num(e_rat);
  return o;
}

Outcome c10() {
  ModelSpec m = default_model();
  m.pulse = {2.0, 0.5};
  std::vector<double> u;
  const Winding w{2, 5};
  for (std::int64_t k = 0; k < w.q; ++k) {
    const double x = w.line(k) + 0.1;
    u.push_back(x + 0.6 * std::sin(2 * std::numbers::pi * x) / (2 * std::numbers::pi));
  }
  const ChainState s(u, w);
  auto run = [&](double dt) {
    IntegratorConfig cfg;
    cfg.dt_max = dt;
    return evolve(s, 4.0 * m.pulse.tau, m, DynamicsMode::pulsating_potential, cfg).positions();
  };
  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  const double h = m.pulse.tau / 80;
  if (stable_step(m, DynamicsMode::pulsating_potential, IntegratorConfig{}, s.rho()) < h) {
    return {false, "scenario step exceeds the stability cap"};
  }
  const auto ref = run(h / 8);
  const double e1 = diff(run(h), ref), e2 = diff(run(h / 2), ref);
  return {e2 > 0.0 && e1 / e2 >= 12.0,
          "error at h " + num(e1) + ", at h/2 " + num(e2) + ", ratio " + num(e1 / e2)};
}

Outcome c11() {
  const RunSettings s = sweep_settings();
  const auto res = sweep({Rational{34, 55}}, sweep_taus(), default_model(), s);
  Outcome o{true, "v tau:"};
  double prev = -INFINITY;
  bool monotone = true;
  for (const auto& row : res.rows) {
    const double vt = row.speed.v * row.tau;
    o.detail += " " + num(vt);
    if (vt < prev - 1e-9) monotone = false;
    prev = vt;
  }
  const auto& last = res.rows.back();
  if (!last.bound.asymmetry) return {false, o.detail + "; no asymmetry at the last tau"};
  const double target = last.bound.asymmetry->alpha - last.bound.gamma - 0.05;
  o.pass = last.speed.converged && last.speed.v * last.tau >= target;
  o.detail += "; final v tau " + num(last.speed.v * last.tau) + " vs alpha - gamma - 0.05 = " +
              num(target) + (monotone ? "; nondecreasing" : "; not monotone over the grid");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Outcome()>> criteria = {
      {1, c1}, {2, c2}, {3, c3}, {4, c4},  {5, c5},  {6, c6},
      {7, c7}, {8, c8}, {9, c9}, {10, c10}, {11, c11}};
  bool all = true;
  for (const auto& [n, fn] : criteria) {
    if (only && n != only) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
