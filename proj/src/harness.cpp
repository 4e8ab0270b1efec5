#include "fkratchet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fkratchet/config.hpp"
#include "fkratchet/errors.hpp"
#include "fkratchet/measure.hpp"

namespace fkr {

namespace {

using json = nlohmann::ordered_json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Visits the state at the cycle start and at n = samples_per_phase + 1 equally
// spaced times in each half-period; the last visit of each half is its end.
template <class Visit>
void walk_cycle(ChainState& state, const ModelSpec& model, const RunSettings& s, Visit&& visit) {
  const double tau = model.pulse.tau;
  const double t0 = state.time();
  const int n = s.samples_per_phase + 1;
  visit(state, false, false);
  for (int half = 0; half < 2; ++half) {
    for (int j = 1; j <= n; ++j) {
      const double t = j == n ? t0 + (half + 1) * tau : t0 + tau * (half + double(j) / n);
      state = evolve(state, t, model, s.mode, s.integrator);
      visit(state, half == 1, j == n);
    }
  }
}

StatSample sample_of(const ChainState& state, const ChainState& origin, bool on_phase,
                     const ModelSpec& model) {
  const EmpiricalMeasure mu(state);
  StatSample out;
  out.t = state.time();
  out.on_phase = on_phase;
  out.avg_width = avg_width(mu);
  out.energy = energy(mu, model.W);
  out.w1_lebesgue = w1_to_lebesgue(project_circle(mu));
  out.mean_disp = mean_displacement(EmpiricalMeasure(origin), mu);
  return out;
}

class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, std::string statement, bool asserted = true) {
    check_.name = std::move(name);
    check_.statement = std::move(statement);
    check_.asserted = asserted;
  }

  void holds(double lhs, double rhs, double slack, double t, const std::string& note = {}) {
    const double margin = rhs + slack - lhs;
    worst_ = std::min(worst_, margin);
    ++check_.evaluations;
    if (!(margin >= 0.0) && check_.passed) {
      check_.passed = false;
      check_.first_failure = "t=" + fmt17(t) + " lhs=" + fmt17(lhs) + " rhs=" + fmt17(rhs) +
                             (note.empty() ? "" : " " + note);
    }
  }

  void flag(bool ok, double t, const std::string& note) {
    holds(ok ? 0.0 : 1.0, 0.0, 0.0, t, note);
  }

  LemmaCheck done() {
    check_.worst_margin = check_.evaluations ? worst_ : 0.0;
    return check_;
  }

 private:
  LemmaCheck check_;
  double worst_ = std::numeric_limits<double>::infinity();
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

void RunSettings::validate() const {
  integrator.validate();
  if (transient_periods < 0) throw ConfigError("transient_periods must be >= 0");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (max_periods < 2 * window) throw ConfigError("max_periods must be at least two windows");
  if (!(speed_tol > 0.0)) throw ConfigError("speed_tol must be > 0");
  if (q_max < 1) throw ConfigError("q_max must be >= 1");
  if (grid_n < 1000) throw ConfigError("grid_n must be >= 1000");
  if (!(fixed_point_tol > 0.0)) throw ConfigError("fixed_point_tol must be > 0");
  if (samples_per_phase < 0) throw ConfigError("samples_per_phase must be >= 0");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

Rational resolve_rho(const RhoSpec& rho, std::int64_t q_max) {
  if (const auto* r = std::get_if<Rational>(&rho)) return *r;
  return best_approximant(rho, q_max);
}

Winding winding_of(const Rational& rho) { return Winding{rho.p, rho.q}; }

ChainState relax(ChainState state, int periods, const ModelSpec& model, const RunSettings& s) {
  for (int i = 0; i < periods; ++i) state = poincare(state, model, s.mode, s.integrator);
  return state;
}

SpeedEstimate measure_speed(const Rational& rho, const ModelSpec& model, const RunSettings& s) {
  return measure_speed_from(ChainState::straight_line(winding_of(rho)), model, s);
}

SpeedEstimate measure_speed_from(ChainState start, const ModelSpec& model, const RunSettings& s) {
  s.validate();
  model.validate();
  SpeedEstimate est;
  est.rho = Rational::make(start.winding().p, start.winding().q);
  ChainState state = relax(std::move(start), s.transient_periods, model, s);
  const double q = static_cast<double>(state.q());
  double previous = nan;
  while (est.n_periods + s.window <= s.max_periods) {
    double sum = 0.0;
    for (int i = 0; i < s.window; ++i) {
      ChainState next = poincare(state, model, s.mode, s.integrator);
      sum += mean_displacement(EmpiricalMeasure(state), EmpiricalMeasure(next));
      if (i + 1 == s.window) {
        double worst = 0.0;
        for (std::size_t k = 0; k < next.positions().size(); ++k) {
          worst = std::max(worst, std::abs(next.positions()[k] - state.positions()[k]));
        }
        est.fixed_point_residual = worst / q;
      }
      state = std::move(next);
      ++est.n_periods;
    }
    const double drift = sum / s.window;
    est.drift = drift;
    if (std::isfinite(previous)) {
      est.residual = std::abs(drift - previous) / std::max(std::abs(drift), 1.0);
      if (est.residual < s.speed_tol) {
        est.converged = true;
        break;
      }
    }
    previous = drift;
  }
  est.v = est.drift / (2.0 * model.pulse.tau);
  est.final_state = std::move(state);
  return est;
}

BoundEvaluation evaluate_bound(const RhoSpec& rho, double tau, const ModelSpec& model,
                               const RunSettings& s) {
  if (!(tau > 0.0)) throw ArgumentError("bound needs tau > 0");
  BoundEvaluation out;
  out.rho_label = to_string(rho);
  out.tau = tau;
  out.deltas = delta_bounds(model.W, rho_value(rho));
  out.c_rho = c_rho(out.deltas.delta_minus, out.deltas.delta_plus);
  const ConvergentSeq seq = continued_fraction(rho, 256);
  out.gamma = gamma_rho_tau(seq, GammaParams{out.c_rho, tau});
  out.optimal_tau = nan;
  out.theorem1 = nan;
  out.on_phase_floor = nan;
  out.generic.value = nan;
  if (s.mode == DynamicsMode::pulsating_potential) {
    const double gamma = out.gamma, c = out.c_rho;
    out.asymmetry = extract_asymmetry(model.V, model.pulse.kappa, out.deltas, s.grid_n,
                                      [&](double alpha, double beta) {
                                        return theorem1_bound({alpha, beta, tau, gamma, c, 0.0});
                                      });
  }
  if (out.asymmetry) {
    const AsymmetryParams& a = *out.asymmetry;
    out.theorem1 = theorem1_bound({a.alpha, a.beta, tau, out.gamma, out.c_rho, 0.0});
    out.vacuous = !(out.theorem1 > 0.0);
    out.on_phase_floor = on_phase_floor(a.alpha, a.beta, tau, 0.25 * out.gamma * out.gamma);
    out.generic = corollary_generic_bound(a.alpha, out.c_rho, tau, 0.0);
    out.optimal_tau = optimal_tau(out.c_rho, a.alpha);
    const auto* q = std::get_if<QuadraticIrrational>(&rho);
    if (q && *q == QuadraticIrrational::golden_mean && a.beta > 0.0 &&
        tau > std::max((0.5 - a.alpha) / a.beta, out.c_rho * out.c_rho)) {
      out.golden = golden_mean_bound(out.c_rho, a.alpha, a.beta, tau);
    }
  }
  return out;
}

bool LemmaReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const LemmaCheck& c) { return c.passed || !c.asserted; });
}

const LemmaCheck* LemmaReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

LemmaReport verify_cycle(const ChainState& start, const ModelSpec& model, const RunSettings& s) {
  s.validate();
  model.validate();
  const double tau = model.pulse.tau;
  const double cycles = start.time() / (2.0 * tau);
  if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles)) {
    throw ArgumentError("verify_cycle needs a start time that is a multiple of 2 tau");
  }
  LemmaReport report;
  report.rho = Rational::make(start.winding().p, start.winding().q);
  report.tau = tau;
  report.kappa = model.pulse.kappa;

  const double rho = start.rho();
  const DeltaBounds d = delta_bounds(model.W, rho);
  const double w_rho = model.W.value(rho);
  const double decay = d.delta_plus * d.delta_plus /
                       (2.0 * d.delta_minus * d.delta_minus * d.delta_minus * tau +
                        d.delta_plus * d.delta_minus);
  std::vector<std::int64_t> denominators;
  for (const auto& c : continued_fraction(report.rho).convergents) {
    if (c.q <= s.q_max) denominators.push_back(c.q);
  }
  constexpr double slack = 1e-9;

  CheckAccumulator order("rotational_order", "u and S^n u + m comparable for all n, m");
  CheckAccumulator width("width_at_most_one", "max width <= 1 (slack 1e-6)");
  CheckAccumulator drift("zero_offphase_drift", "|mean displacement over the off-phase| <= 1e-8");
  CheckAccumulator poinc("poincare_inequality",
                         "avg_width <= ((1/q) sum (u_{k+1} - 2u_k + u_{k-1})^2)^(1/2)");
  CheckAccumulator force("force_inequality",
                         "dminus^2 (1/q) sum (D2 u)^2 <= (1/q) sum (W'(u_{k+1}-u_k) - W'(u_k-u_{k-1}))^2");
  CheckAccumulator e_up("energy_upper", "energy - W(rho) <= dplus avg_width");
  CheckAccumulator e_low("energy_lower", "dminus avg_width <= energy - W(rho)");
  CheckAccumulator e_half("energy_lower_half", "(dminus / 2) avg_width <= energy - W(rho)", false);
  CheckAccumulator lyap("energy_nonincreasing", "energy non-increasing along the off-phase");
  CheckAccumulator decay_check("width_decay",
                               "avg_width at off-phase end <= dplus^2 / (2 dminus^3 tau + dplus dminus)");
  CheckAccumulator circle("circle_distance",
                          "d1(proj mu, Lebesgue) <= (q/sqrt 3) avg_width^(1/2) + 3/(4q), convergents q <= q_max");

  const ChainState origin = start;
  ChainState state = start;
  double last_off_energy = nan;
  walk_cycle(state, model, s, [&](const ChainState& u, bool on_phase, bool phase_end) {
    const double t = u.time();
    const EmpiricalMeasure mu(u);
    const StatSample sample = sample_of(u, origin, on_phase, model);
    report.samples.push_back(sample);

    order.flag(check_rotational_order(u), t, "ordering violated");
    width.holds(max_width(u), 1.0, 1e-6, t);
    const double d2 = second_difference_msq(mu);
    poinc.holds(sample.avg_width, std::sqrt(d2), slack, t);
    force.holds(d.delta_minus * d.delta_minus * d2, force_difference_msq(mu, model.W), slack, t);
    const double excess = sample.energy - w_rho;
    e_up.holds(excess, d.delta_plus * sample.avg_width, slack, t);
    e_low.holds(d.delta_minus * sample.avg_width, excess, slack, t);
    e_half.holds(0.5 * d.delta_minus * sample.avg_width, excess, slack, t);
    for (const std::int64_t q : denominators) {
      const double qd = static_cast<double>(q);
      circle.holds(sample.w1_lebesgue,
                   qd / std::sqrt(3.0) * std::sqrt(sample.avg_width) + 0.75 / qd, slack, t,
                   "q=" + std::to_string(q));
    }
    if (!on_phase) {
      if (std::isfinite(last_off_energy)) lyap.holds(sample.energy, last_off_energy, slack, t);
      last_off_energy = sample.energy;
      if (phase_end) {
        drift.holds(std::abs(sample.mean_disp), 0.0, 1e-8, t);
        decay_check.holds(sample.avg_width, decay, slack, t);
      }
    }
  });

  for (CheckAccumulator* c : {&order, &width, &drift, &poinc, &force, &e_up, &e_low, &e_half,
                              &lyap, &decay_check, &circle}) {
    report.checks.push_back(c->done());
  }
  return report;
}

LemmaReport verify_lemmas(const Rational& rho, const ModelSpec& model, const RunSettings& s) {
  const ChainState relaxed =
      relax(ChainState::straight_line(winding_of(rho)), s.transient_periods, model, s);
  return verify_cycle(relaxed, model, s);
}

std::vector<StatSample> simulate(ChainState& state, int periods, const ModelSpec& model,
                                 const RunSettings& s) {
  if (periods < 0) throw ArgumentError("simulate needs periods >= 0");
  std::vector<StatSample> out;
  const ChainState origin = state;
  for (int i = 0; i < periods; ++i) {
    walk_cycle(state, model, s, [&](const ChainState& u, bool on_phase, bool) {
      if (i > 0 && u.time() == state.time() && out.size() && out.back().t == u.time()) return;
      out.push_back(sample_of(u, origin, on_phase, model));
    });
  }
  return out;
}

bool SweepRow::consistent(double speed_tol) const {
  if (bound.vacuous || !speed.converged) return true;
  return speed.v >= bound.theorem1 - speed_tol;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw ArgumentError("log_grid needs 0 < lo <= hi, n >= 1");
  std::vector<double> out;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) {
    out.push_back(i == n - 1 ? hi : lo * std::pow(hi / lo, double(i) / (n - 1)));
  }
  return out;
}

SweepResult sweep(const std::vector<RhoSpec>& rhos, const std::vector<double>& taus,
                  const ModelSpec& model, const RunSettings& s) {
  if (rhos.empty() || taus.empty()) throw ArgumentError("sweep needs nonempty rho and tau lists");
  s.validate();
  struct Cell {
    Rational rho;
    double tau;
  };
  std::vector<Cell> cells;
  for (const auto& r : rhos) {
    const Rational rho = resolve_rho(r, s.q_max);
    for (double tau : taus) {
      if (!(tau > 0.0)) throw ArgumentError("sweep needs tau > 0");
      cells.push_back({rho, tau});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    // p_a/q_a < p_b/q_b without rounding: both q > 0.
    __extension__ using wide = __int128;
    const wide lhs = static_cast<wide>(a.rho.p) * b.rho.q;
    const wide rhs = static_cast<wide>(b.rho.p) * a.rho.q;
    if (lhs != rhs) return lhs < rhs;
    return a.tau < b.tau;
  });

  SweepResult result;
  result.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        ModelSpec cell_model = model;
        cell_model.pulse.tau = cells[i].tau;
        SweepRow row;
        row.rho = cells[i].rho;
        row.tau = cells[i].tau;
        row.speed = measure_speed(cells[i].rho, cell_model, s);
        row.bound = evaluate_bound(cells[i].rho, cells[i].tau, cell_model, s);
        result.rows[i] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(s.workers > 0 ? static_cast<std::size_t>(s.workers) : hw, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "rho,tau,v_measured,bound_value,bound_vacuous,gamma,alpha,beta,converged,n_periods,"
         "residual\n";
  for (const auto& r : result.rows) {
    const auto& a = r.bound.asymmetry;
    out << r.rho.str() << ',' << fmt17(r.tau) << ',' << fmt17(r.speed.v) << ','
        << fmt17(r.bound.theorem1) << ',' << bool_str(r.bound.vacuous) << ','
        << fmt17(r.bound.gamma) << ',' << fmt17(a ? a->alpha : nan) << ','
        << fmt17(a ? a->beta : nan) << ',' << bool_str(r.speed.converged) << ','
        << r.speed.n_periods << ',' << fmt17(r.speed.residual) << '\n';
  }
}

void write_stats_csv(std::ostream& out, const std::vector<StatSample>& samples) {
  out << "t,phase,avg_width,energy,w1_leb,mean_disp\n";
  for (const auto& s : samples) {
    out << fmt17(s.t) << ',' << (s.on_phase ? "on" : "off") << ',' << fmt17(s.avg_width) << ','
        << fmt17(s.energy) << ',' << fmt17(s.w1_lebesgue) << ',' << fmt17(s.mean_disp) << '\n';
  }
}

std::string report_json(const LemmaReport& report) {
  json j;
  j["rho"] = report.rho.str();
  j["tau"] = report.tau;
  j["kappa"] = report.kappa;
  j["passed"] = report.passed();
  json checks = json::array();
  for (const auto& c : report.checks) {
    json cj;
    cj["name"] = c.name;
    cj["statement"] = c.statement;
    cj["asserted"] = c.asserted;
    cj["passed"] = c.passed;
    cj["worst_margin"] = num(c.worst_margin);
    cj["evaluations"] = c.evaluations;
    if (!c.first_failure.empty()) cj["first_failure"] = c.first_failure;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

std::string speed_json(const SpeedEstimate& est, double tau) {
  json j;
  j["rho"] = est.rho.str();
  j["tau"] = tau;
  j["v"] = num(est.v);
  j["drift_per_period"] = num(est.drift);
  j["n_periods"] = est.n_periods;
  j["converged"] = est.converged;
  j["residual"] = num(est.residual);
  j["fixed_point_residual"] = num(est.fixed_point_residual);
  return j.dump(2) + "\n";
}

std::string bound_json(const BoundEvaluation& b) {
  json j;
  j["rho"] = b.rho_label;
  j["tau"] = b.tau;
  j["delta_minus"] = b.deltas.delta_minus;
  j["delta_plus"] = b.deltas.delta_plus;
  j["c_rho"] = b.c_rho;
  j["gamma"] = b.gamma;
  if (b.asymmetry) {
    j["alpha"] = b.asymmetry->alpha;
    j["beta"] = b.asymmetry->beta;
    j["interval"] = {b.asymmetry->a, b.asymmetry->b};
  } else {
    j["alpha"] = nullptr;
    j["beta"] = nullptr;
  }
  j["theorem1_bound"] = num(b.theorem1);
  j["vacuous"] = b.vacuous;
  j["on_phase_floor"] = num(b.on_phase_floor);
  j["generic_bound_explicit_part"] = num(b.generic.value);
  j["generic_leading_coefficient"] = num(b.generic.leading_coefficient);
  j["generic_remainder"] = b.generic.remainder;
  j["optimal_tau"] = num(b.optimal_tau);
  if (b.golden) {
    j["golden_mean_bound"] = b.golden->value;
    j["golden_mean_consistent"] = b.golden->consistent();
  }
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

namespace {

RunSettings settings_from_config(const Config& cfg) {
  RunSettings s;
  s.mode = mode_from_config(cfg);
  s.integrator.dt_max = cfg.get_double("run.dt_max", s.integrator.dt_max);
  s.integrator.safety = cfg.get_double("run.safety", s.integrator.safety);
  s.transient_periods = static_cast<int>(cfg.get_int("run.transient_periods", s.transient_periods));
  s.max_periods = static_cast<int>(cfg.get_int("run.max_periods", s.max_periods));
  s.window = static_cast<int>(cfg.get_int("run.window", s.window));
  s.speed_tol = cfg.get_double("run.speed_tol", s.speed_tol);
  s.q_max = cfg.get_int("run.q_max", s.q_max);
  s.grid_n = static_cast<int>(cfg.get_int("run.grid_n", s.grid_n));
  s.fixed_point_tol = cfg.get_double("run.fixed_point_tol", s.fixed_point_tol);
  s.samples_per_phase = static_cast<int>(cfg.get_int("run.samples_per_phase", s.samples_per_phase));
  s.workers = static_cast<int>(cfg.get_int("run.workers", s.workers));
  s.validate();
  return s;
}

RhoSpec rho_from_config(const Config& cfg) {
  const auto* e = cfg.find("run.rho");
  if (!e) throw ConfigError("run.rho is required for this command");
  try {
    return parse_rho(e->value);
  } catch (const ArgumentError& err) {
    throw ConfigError(err.what(), e->line);
  }
}

std::vector<double> taus_from_config(const Config& cfg, double fallback) {
  std::vector<double> taus;
  const auto* grid = cfg.find("run.tau_grid");
  if (grid && cfg.has("run.tau_list")) throw ConfigError("give tau_list or tau_grid, not both", grid->line);
  if (grid) {
    const auto parts = cfg.get_list("run.tau_grid");
    if (parts.size() != 3) throw ConfigError("tau_grid expects 'lo, hi, n'", grid->line);
    try {
      return log_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("tau_grid: ") + e.what(), grid->line);
    }
  }
  for (const auto& item : cfg.get_list("run.tau_list")) {
    try {
      taus.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("tau_list: cannot parse '" + item + "'", cfg.find("run.tau_list")->line);
    }
  }
  if (taus.empty()) taus.push_back(fallback);
  return taus;
}

void emit(const Config& cfg, const std::string& key, const std::string& content, std::ostream& log) {
  const std::string path = cfg.get_string(key, "");
  if (path.empty()) {
    log << content;
  } else {
    write_file_atomic(path, content);
    log << "wrote " << path << "\n";
  }
}

int dispatch(const Config& cfg, std::ostream& log) {
  const auto* cmd_entry = cfg.find("run.command");
  const std::string command = cmd_entry ? cmd_entry->value : "speed";
  const ModelSpec model = model_from_config(cfg);
  const RunSettings s = settings_from_config(cfg);

  if (command == "speed") {
    const Rational rho = resolve_rho(rho_from_config(cfg), s.q_max);
    const SpeedEstimate est = measure_speed(rho, model, s);
    emit(cfg, "run.summary", speed_json(est, model.pulse.tau), log);
    if (!est.converged) log << "warning: speed did not converge within max_periods\n";
    return exit_ok;
  }
  if (command == "verify") {
    const Rational rho = resolve_rho(rho_from_config(cfg), s.q_max);
    const LemmaReport report = verify_lemmas(rho, model, s);
    if (cfg.has("run.output")) {
      std::ostringstream csv;
      write_stats_csv(csv, report.samples);
      emit(cfg, "run.output", csv.str(), log);
    }
    emit(cfg, "run.summary", report_json(report), log);
    return report.passed() ? exit_ok : exit_invariant;
  }
  if (command == "sweep") {
    std::vector<RhoSpec> rhos;
    const auto* list = cfg.find("run.rho_list");
    if (!list) throw ConfigError("sweep needs run.rho_list");
    for (const auto& item : cfg.get_list("run.rho_list")) {
      try {
        rhos.push_back(parse_rho(item));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what(), list->line);
      }
    }
    const SweepResult result = sweep(rhos, taus_from_config(cfg, model.pulse.tau), model, s);
    std::ostringstream csv;
    write_sweep_csv(csv, result);
    emit(cfg, "run.output", csv.str(), log);
    bool ok = true;
    for (const auto& row : result.rows) {
      if (!row.consistent(s.speed_tol)) {
        ok = false;
        log << "bound violated at rho=" << row.rho.str() << " tau=" << fmt17(row.tau) << "\n";
      }
    }
    return ok ? exit_ok : exit_invariant;
  }
  if (command == "bound") {
    const BoundEvaluation b = evaluate_bound(rho_from_config(cfg), model.pulse.tau, model, s);
    emit(cfg, "run.summary", bound_json(b), log);
    return exit_ok;
  }
  if (command == "cfrac") {
    const ConvergentSeq seq =
        continued_fraction(rho_from_config(cfg), static_cast<int>(cfg.get_int("run.max_terms", 64)));
    json j;
    j["rho"] = seq.rho;
    j["terms"] = seq.terms;
    json conv = json::array();
    for (const auto& c : seq.convergents) conv.push_back({c.p, c.q});
    j["convergents"] = conv;
    j["terminated"] = seq.terminated;
    emit(cfg, "run.summary", j.dump(2) + "\n", log);
    return exit_ok;
  }
  if (command == "simulate") {
    const Rational rho = resolve_rho(rho_from_config(cfg), s.q_max);
    ChainState state = ChainState::straight_line(winding_of(rho));
    const auto periods = cfg.get_int("run.periods", 1);
    if (periods < 0) throw ConfigError("run.periods must be >= 0");
    const auto samples = simulate(state, static_cast<int>(periods), model, s);
    std::ostringstream csv;
    write_stats_csv(csv, samples);
    emit(cfg, "run.output", csv.str(), log);
    if (cfg.has("run.checkpoint")) {
      std::ostringstream ck;
      write_checkpoint(ck, state, model_hash(model));
      write_file_atomic(cfg.get_string("run.checkpoint", ""), ck.str());
    }
    return exit_ok;
  }
  throw ConfigError("unknown command '" + command + "'", cmd_entry ? cmd_entry->line : 0);
}

int guarded(const std::function<Config()>& load, std::ostream& log) {
  try {
    return dispatch(load(), log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ArgumentError& e) {
    log << "invalid argument: " << e.what() << "\n";
    return exit_config;
  }
}

}  // namespace

int run_config(const std::string& path, std::ostream& log) {
  return guarded([&] { return Config::parse_file(path); }, log);
}

int run_config_text(const std::string& text, std::ostream& log) {
  return guarded([&] { return Config::parse_string(text); }, log);
}

}  // namespace fkr
