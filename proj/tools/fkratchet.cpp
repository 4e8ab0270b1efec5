// Command-line front end: simulate, speed, sweep, bound, cfrac, verify, run.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fkratchet/config.hpp"
#include "fkratchet/errors.hpp"
#include "fkratchet/harness.hpp"
#include "fkratchet/numtheory.hpp"

namespace {

using namespace fkr;

struct Common {
  std::string model_path;
  std::string mode = "potential";
  double tau = 0.0;  // 0: take the model's
  double kappa = -1.0;
  RunSettings settings;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--model", c.model_path, "model file ([model]/[pulse] keys)");
  app->add_option("--mode", c.mode, "potential or interaction")
      ->check(CLI::IsMember({"potential", "interaction"}));
  app->add_option("--tau", c.tau, "half-period, overrides the model");
  app->add_option("--kappa", c.kappa, "pulse amplitude, overrides the model");
  app->add_option("--transient", c.settings.transient_periods, "periods discarded first");
  app->add_option("--max-periods", c.settings.max_periods, "measurement budget in periods");
  app->add_option("--window", c.settings.window, "periods per averaging window");
  app->add_option("--speed-tol", c.settings.speed_tol, "convergence tolerance");
  app->add_option("--dt-max", c.settings.integrator.dt_max, "largest RK4 step");
  app->add_option("--q-max", c.settings.q_max, "largest approximant denominator");
  app->add_option("--grid-n", c.settings.grid_n, "asymmetry search grid size");
  app->add_option("--samples", c.settings.samples_per_phase, "interior samples per half-period");
  app->add_option("--workers", c.settings.workers, "sweep threads, 0 = all cores");
}

ModelSpec load_model(Common& c) {
  ModelSpec model = default_model();
  if (!c.model_path.empty()) model = model_from_config(Config::parse_file(c.model_path));
  if (c.tau > 0.0) model.pulse.tau = c.tau;
  if (c.kappa >= 0.0) model.pulse.kappa = c.kappa;
  try {
    model.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
  c.settings.mode = c.mode == "interaction" ? DynamicsMode::pulsating_interaction
                                            : DynamicsMode::pulsating_potential;
  c.settings.validate();
  return model;
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsating Frenkel-Kontorova chain: simulation, transport speed and bounds"};
  app.require_subcommand(1);

  Common sim_c, speed_c, sweep_c, bound_c, verify_c;
  std::string rho_text, output, summary, checkpoint, resume;
  int periods = 1;

  auto* sim = app.add_subcommand("simulate", "evolve from the straight line and sample statistics");
  add_common(sim, sim_c);
  sim->add_option("--rho", rho_text, "mean spacing")->required();
  sim->add_option("--periods", periods, "full pulse periods")->check(CLI::NonNegativeNumber);
  sim->add_option("--output", output, "statistics CSV (stdout if omitted)");
  sim->add_option("--checkpoint", checkpoint, "write the final state here");
  sim->add_option("--resume", resume, "start from this checkpoint instead");

  auto* speed = app.add_subcommand("speed", "measure the transport speed");
  add_common(speed, speed_c);
  speed->add_option("--rho", rho_text, "mean spacing")->required();
  speed->add_option("--summary", summary, "JSON output (stdout if omitted)");

  std::vector<std::string> rho_list;
  std::vector<double> tau_list;
  std::vector<double> tau_grid;
  auto* sw = app.add_subcommand("sweep", "speed and bound over a (rho, tau) grid");
  add_common(sw, sweep_c);
  sw->add_option("--rho-list", rho_list, "mean spacings")->required()->delimiter(',');
  auto* tl = sw->add_option("--tau-list", tau_list, "half-periods")->delimiter(',');
  sw->add_option("--tau-grid", tau_grid, "lo,hi,n log-spaced half-periods")
      ->delimiter(',')
      ->expected(3)
      ->excludes(tl);
  sw->add_option("--output", output, "CSV (stdout if omitted)");

  auto* bound = app.add_subcommand("bound", "evaluate the speed lower bounds");
  add_common(bound, bound_c);
  bound->add_option("--rho", rho_text, "mean spacing")->required();

  int max_terms = 64;
  auto* cf = app.add_subcommand("cfrac", "continued fraction and convergents");
  cf->add_option("rho", rho_text, "mean spacing")->required();
  cf->add_option("--max-terms", max_terms, "partial quotients to expand")
      ->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "check the lemma invariants over one cycle");
  add_common(ver, verify_c);
  ver->add_option("--rho", rho_text, "mean spacing")->required();
  ver->add_option("--summary", summary, "JSON report (stdout if omitted)");
  ver->add_option("--output", output, "statistics CSV");

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute a config file");
  run->add_option("config", config_path, "config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*run) return run_config(config_path, std::cerr);

    if (*cf) {
      const ConvergentSeq seq = continued_fraction(parse_rho(rho_text), max_terms);
      std::cout << "rho " << fmt(seq.rho) << "\nterms";
      for (auto a : seq.terms) std::cout << ' ' << a;
      std::cout << "\nterminated " << (seq.terminated ? "true" : "false") << "\n";
      std::cout << "n p q\n";
      for (std::size_t i = 0; i < seq.convergents.size(); ++i) {
        std::cout << i << ' ' << seq.convergents[i].p << ' ' << seq.convergents[i].q << '\n';
      }
      return exit_ok;
    }

    if (*bound) {
      const ModelSpec model = load_model(bound_c);
      const BoundEvaluation b =
          evaluate_bound(parse_rho(rho_text), model.pulse.tau, model, bound_c.settings);
      std::cout << bound_json(b);
      return exit_ok;
    }

    if (*speed) {
      const ModelSpec model = load_model(speed_c);
      const Rational rho = resolve_rho(parse_rho(rho_text), speed_c.settings.q_max);
      const SpeedEstimate est = measure_speed(rho, model, speed_c.settings);
      write_or_print(summary, speed_json(est, model.pulse.tau));
      if (!est.converged) std::cerr << "warning: speed did not converge within max_periods\n";
      return exit_ok;
    }

    if (*sw) {
      const ModelSpec model = load_model(sweep_c);
      std::vector<RhoSpec> rhos;
      for (const auto& r : rho_list) rhos.push_back(parse_rho(r));
      std::vector<double> taus = tau_list;
      if (!tau_grid.empty()) {
        taus = log_grid(tau_grid[0], tau_grid[1], static_cast<int>(tau_grid[2]));
      }
      if (taus.empty()) taus.push_back(model.pulse.tau);
      const SweepResult result = sweep(rhos, taus, model, sweep_c.settings);
      std::ostringstream csv;
      write_sweep_csv(csv, result);
      write_or_print(output, csv.str());
      bool ok = true;
      for (const auto& row : result.rows) {
        if (!row.consistent(sweep_c.settings.speed_tol)) {
          ok = false;
          std::cerr << "bound violated at rho=" << row.rho.str() << " tau=" << fmt(row.tau) << "\n";
        }
      }
      return ok ? exit_ok : exit_invariant;
    }

    if (*ver) {
      const ModelSpec model = load_model(verify_c);
      const Rational rho = resolve_rho(parse_rho(rho_text), verify_c.settings.q_max);
      const LemmaReport report = verify_lemmas(rho, model, verify_c.settings);
      if (!output.empty()) {
        std::ostringstream csv;
        write_stats_csv(csv, report.samples);
        write_file_atomic(output, csv.str());
      }
      write_or_print(summary, report_json(report));
      for (const auto& c : report.checks) {
        if (!c.passed) {
          std::cerr << (c.asserted ? "FAILED " : "note: ") << c.name << ": " << c.statement
                    << " (" << c.first_failure << ")\n";
        }
      }
      return report.passed() ? exit_ok : exit_invariant;
    }

    if (*sim) {
      const ModelSpec model = load_model(sim_c);
      ChainState state = ChainState::straight_line({0, 1});
      if (!resume.empty()) {
        std::ifstream in(resume);
        if (!in) throw ConfigError("cannot open checkpoint '" + resume + "'");
        Checkpoint ck = read_checkpoint(in);
        if (ck.model_hash != model_hash(model)) {
          throw ConfigError("checkpoint was written for a different model");
        }
        state = std::move(ck.state);
      } else {
        state = ChainState::straight_line(
            winding_of(resolve_rho(parse_rho(rho_text), sim_c.settings.q_max)));
      }
      const auto samples = simulate(state, periods, model, sim_c.settings);
      std::ostringstream csv;
      write_stats_csv(csv, samples);
      write_or_print(output, csv.str());
      if (!checkpoint.empty()) {
        std::ostringstream ck;
        write_checkpoint(ck, state, model_hash(model));
        write_file_atomic(checkpoint, ck.str());
      }
      return exit_ok;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_ok;
}
