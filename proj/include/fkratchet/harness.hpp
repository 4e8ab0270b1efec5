#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fkratchet/bounds.hpp"
#include "fkratchet/chain.hpp"
#include "fkratchet/numtheory.hpp"
#include "fkratchet/potentials.hpp"

namespace fkr {

struct RunSettings {
  IntegratorConfig integrator;
  DynamicsMode mode = DynamicsMode::pulsating_potential;
  int transient_periods = 50;
  int max_periods = 4000;  // measurement periods, transient excluded
  int window = 32;
  double speed_tol = 1e-6;
  std::int64_t q_max = 233;
  int grid_n = 4096;
  double fixed_point_tol = 1e-6;
  int samples_per_phase = 16;  // interior sample times per half-period
  int workers = 0;             // 0: hardware concurrency

  void validate() const;
};

// Rationals pass through; anything else is replaced by its last convergent
// with q <= q_max.
Rational resolve_rho(const RhoSpec& rho, std::int64_t q_max);
Winding winding_of(const Rational& rho);

// Applies `periods` Poincare maps.
ChainState relax(ChainState state, int periods, const ModelSpec& model, const RunSettings& s);

struct SpeedEstimate {
  Rational rho;
  double v = 0.0;                 // drift / (2 tau)
  double drift = 0.0;             // mean displacement per period, last window
  int n_periods = 0;              // measured periods after the transient
  bool converged = false;
  double residual = 0.0;          // |D_w - D_{w-1}| / max(|D_w|, 1)
  double fixed_point_residual = 0.0;  // max_k |(Tu)_k - u_k| / q, last period
  ChainState final_state = ChainState::straight_line({0, 1});
};

SpeedEstimate measure_speed(const Rational& rho, const ModelSpec& model, const RunSettings& s);
// Same estimator from an arbitrary start (its time must be a multiple of 2 tau).
SpeedEstimate measure_speed_from(ChainState start, const ModelSpec& model, const RunSettings& s);

// Everything the bound module can say at one (rho, tau).
struct BoundEvaluation {
  std::string rho_label;
  double tau = 0.0;
  DeltaBounds deltas;
  double c_rho = 0.0;
  double gamma = 0.0;
  std::optional<AsymmetryParams> asymmetry;
  double theorem1 = 0.0;          // NaN without asymmetry
  bool vacuous = true;            // theorem1 <= 0 or unavailable
  double on_phase_floor = 0.0;    // at epsilon = gamma^2 / 4, NaN without asymmetry
  GenericBound generic;
  double optimal_tau = 0.0;
  std::optional<GoldenMeanBound> golden;  // golden-mean rho inside its domain only
};

// (alpha, beta) are chosen to maximise theorem1_bound at this tau.
BoundEvaluation evaluate_bound(const RhoSpec& rho, double tau, const ModelSpec& model,
                               const RunSettings& s);

struct StatSample {
  double t = 0.0;
  bool on_phase = false;
  double avg_width = 0.0;
  double energy = 0.0;
  double w1_lebesgue = 0.0;
  double mean_disp = 0.0;  // since the start of the verified cycle
};

struct LemmaCheck {
  std::string name;
  std::string statement;
  bool asserted = true;  // informational checks never fail a report
  bool passed = true;
  double worst_margin = 0.0;  // min over evaluations of (rhs + slack - lhs)
  int evaluations = 0;
  std::string first_failure;
};

struct LemmaReport {
  Rational rho;
  double tau = 0.0;
  double kappa = 0.0;
  std::vector<LemmaCheck> checks;
  std::vector<StatSample> samples;

  bool passed() const;
  const LemmaCheck* find(const std::string& name) const;
};

// One pulse cycle from `state` (time a multiple of 2 tau), sampled at both
// phase boundaries and samples_per_phase interior times of each half-period.
LemmaReport verify_cycle(const ChainState& state, const ModelSpec& model, const RunSettings& s);
// Straight line, transient, then verify_cycle.
LemmaReport verify_lemmas(const Rational& rho, const ModelSpec& model, const RunSettings& s);

struct SweepRow {
  Rational rho;
  double tau = 0.0;
  SpeedEstimate speed;
  BoundEvaluation bound;

  // v >= bound - speed_tol whenever the bound is informative.
  bool consistent(double speed_tol) const;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (rho, tau)
};

SweepResult sweep(const std::vector<RhoSpec>& rhos, const std::vector<double>& taus,
                  const ModelSpec& model, const RunSettings& s);

// Log-spaced grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

// rho,tau,v_measured,bound_value,bound_vacuous,gamma,alpha,beta,converged,n_periods,residual
void write_sweep_csv(std::ostream& out, const SweepResult& result);
// t,phase,avg_width,energy,w1_leb,mean_disp
void write_stats_csv(std::ostream& out, const std::vector<StatSample>& samples);

std::string report_json(const LemmaReport& report);
std::string speed_json(const SpeedEstimate& est, double tau);
std::string bound_json(const BoundEvaluation& b);

// Evolves for `periods` full cycles from `start`, sampling like verify_cycle.
std::vector<StatSample> simulate(ChainState& state, int periods, const ModelSpec& model,
                                 const RunSettings& s);

// Writes to path + ".tmp" then renames over path.
void write_file_atomic(const std::string& path, const std::string& content);

// Exit codes for run_config and the CLI.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invariant = 1;
inline constexpr int exit_config = 2;

// Runs the command named by run.command. Human-readable progress goes to log.
int run_config(const std::string& path, std::ostream& log);
int run_config_text(const std::string& text, std::ostream& log);

}  // namespace fkr
