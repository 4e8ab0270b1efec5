#include "fkratchet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fkratchet/errors.hpp"

namespace fkr {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t d = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
  return d;
}

// Owns the RK4 stage buffers so the inner loop never allocates.
class Rk4Stepper {
 public:
  Rk4Stepper(const ModelSpec& model, DynamicsMode mode, Winding winding)
      : model_(model), mode_(mode), winding_(winding) {
    const auto n = static_cast<std::size_t>(winding.q);
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
  }

  void step(std::vector<double>& u, double pulse, double dt) {
    const std::size_t n = u.size();
    const double h2 = 0.5 * dt;
    rhs_with_pulse(u, winding_, pulse, model_, mode_, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + h2 * k1_[i];
    rhs_with_pulse(tmp_, winding_, pulse, model_, mode_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + h2 * k2_[i];
    rhs_with_pulse(tmp_, winding_, pulse, model_, mode_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * k3_[i];
    rhs_with_pulse(tmp_, winding_, pulse, model_, mode_, k4_);
    const double h6 = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += h6 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  const ModelSpec& model_;
  DynamicsMode mode_;
  Winding winding_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

ChainState::ChainState(std::vector<double> positions, Winding winding, double time)
    : positions_(std::move(positions)), winding_(winding), time_(time) {
  if (winding_.q < 1) throw ArgumentError("winding needs q >= 1");
  if (std::gcd(winding_.p, winding_.q) != 1) {
    throw ArgumentError("winding (p, q) must be coprime");
  }
  if (positions_.size() != static_cast<std::size_t>(winding_.q)) {
    throw ArgumentError("chain state needs exactly q positions");
  }
  if (!(time_ >= 0.0)) throw ArgumentError("chain state time must be >= 0");
  for (double x : positions_) {
    if (!std::isfinite(x)) throw ArgumentError("chain state positions must be finite");
  }
}

ChainState ChainState::straight_line(Winding winding, double offset) {
  if (winding.q < 1) throw ArgumentError("winding needs q >= 1");
  std::vector<double> u(static_cast<std::size_t>(winding.q));
  for (std::int64_t k = 0; k < winding.q; ++k) u[static_cast<std::size_t>(k)] = winding.line(k) + offset;
  return ChainState(std::move(u), winding);
}

double ChainState::at(std::int64_t k) const noexcept {
  const std::int64_t wraps = floor_div(k, winding_.q);
  const std::int64_t idx = k - wraps * winding_.q;
  return positions_[static_cast<std::size_t>(idx)] + static_cast<double>(winding_.p * wraps);
}

const char* to_string(DynamicsMode mode) noexcept {
  return mode == DynamicsMode::pulsating_potential ? "potential" : "interaction";
}

void IntegratorConfig::validate() const {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw ConfigError("dt_max must be > 0");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("safety must lie in (0, 1]");
  if (!(max_steps >= 1.0)) throw ConfigError("max_steps must be >= 1");
}

double stable_step(const ModelSpec& model, DynamicsMode mode, const IntegratorConfig& cfg,
                   double rho) {
  cfg.validate();
  const double dplus = delta_bounds(model.W, rho).delta_plus;
  const double vpp = model.V.second_derivative_bound();
  const double kappa = model.pulse.kappa;
  const double stiffness = mode == DynamicsMode::pulsating_potential
                               ? 4.0 * dplus + kappa * vpp
                               : 4.0 * kappa * dplus + vpp;
  if (stiffness <= 0.0) return cfg.dt_max;
  return std::min(cfg.dt_max, cfg.safety / stiffness);
}

void rhs_with_pulse(std::span<const double> u, const Winding& winding, double pulse,
                    const ModelSpec& model, DynamicsMode mode, std::span<double> out) {
  const std::size_t n = u.size();
  const double p = static_cast<double>(winding.p);
  // g_k = W'(u_{k+1} - u_k); the closing spacing uses u_q = u_0 + p, which is
  // also the spacing u_0 - u_{-1}, so the cell sum of (g_k - g_{k-1}) telescopes.
  double g_last = model.W.first(u[0] + p - u[n - 1]);
  double g_prev = g_last;
  for (std::size_t k = 0; k < n; ++k) {
    const double g = (k + 1 < n) ? model.W.first(u[k + 1] - u[k]) : g_last;
    const double coupling = g - g_prev;
    if (mode == DynamicsMode::pulsating_potential) {
      out[k] = pulse == 0.0 ? coupling : coupling + pulse * model.V.first(u[k]);
    } else {
      out[k] = pulse * coupling + model.V.first(u[k]);
    }
    g_prev = g;
  }
}

std::vector<double> rhs(const ChainState& state, double t, const ModelSpec& model,
                        DynamicsMode mode) {
  std::vector<double> out(state.positions().size());
  rhs_with_pulse(state.positions(), state.winding(), pulse_value(model.pulse, t), model, mode,
                 out);
  return out;
}

ChainState evolve(const ChainState& state, double t_end, const ModelSpec& model,
                  DynamicsMode mode, const IntegratorConfig& cfg) {
  model.validate();
  const double t0 = state.time();
  if (!(t_end >= t0)) throw ArgumentError("evolve needs t_end >= state.time()");
  ChainState out = state;
  if (t_end == t0) return out;

  const double tau = model.pulse.tau;
  const double dt_target = stable_step(model, mode, cfg, state.rho());
  if ((t_end - t0) / dt_target > cfg.max_steps) {
    throw ConfigError("step budget exceeded: dt_max too small for the requested time span");
  }
  // Snap times that sit within rounding of a switch onto it.
  const double snap = 1e-12 * std::max(1.0, t_end / tau);

  Rk4Stepper stepper(model, mode, state.winding());
  auto& u = out.positions();
  double t = t0;
  while (t < t_end) {
    double idx = std::floor(t / tau);
    if ((idx + 1.0) - t / tau <= snap) idx += 1.0;
    const double seg_end = std::min((idx + 1.0) * tau, t_end);
    const double len = seg_end - t;
    if (len <= snap * tau) {
      t = seg_end;
      continue;
    }
    const double pulse = std::fmod(idx, 2.0) == 0.0 ? 0.0 : model.pulse.kappa;
    const auto steps = static_cast<std::int64_t>(std::ceil(len / dt_target - 1e-9));
    const double dt = len / static_cast<double>(steps);
    for (std::int64_t s = 0; s < steps; ++s) stepper.step(u, pulse, dt);
    t = seg_end;
  }
  out.set_time(t_end);
  return out;
}

ChainState poincare(const ChainState& state, const ModelSpec& model, DynamicsMode mode,
                    const IntegratorConfig& cfg) {
  const double period = 2.0 * model.pulse.tau;
  const double cycles = state.time() / period;
  if (std::abs(cycles - std::round(cycles)) > 1e-9) {
    throw ArgumentError("poincare map needs state.time() to be a multiple of 2 tau");
  }
  return evolve(state, (std::round(cycles) + 1.0) * period, model, mode, cfg);
}

bool check_order_preserved(const ChainState& u0, const ChainState& v0, double t,
                           const ModelSpec& model, DynamicsMode mode,
                           const IntegratorConfig& cfg) {
  if (!(u0.winding() == v0.winding())) throw ArgumentError("order check needs equal windings");
  if (!(t >= 0.0)) throw ArgumentError("order check needs t >= 0");
  const auto& a = u0.positions();
  const auto& b = v0.positions();
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) throw ArgumentError("order check needs u0 >= v0 componentwise");
    if (a[i] != b[i]) identical = false;
  }
  const ChainState ut = evolve(u0, u0.time() + t, model, mode, cfg);
  const ChainState vt = evolve(v0, v0.time() + t, model, mode, cfg);
  const auto& x = ut.positions();
  const auto& y = vt.positions();
  if (identical) return x == y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > y[i])) return false;
  }
  return true;
}

bool check_rotational_order(const ChainState& state, double tol) {
  if (!(tol >= 0.0)) throw ArgumentError("check_rotational_order needs tol >= 0");
  const std::int64_t q = state.q();
  for (std::int64_t n = 1; n < q; ++n) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::int64_t k = 0; k < q; ++k) {
      const double d = state.at(k) - state.at(k - n);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    // S^n u + m crosses u iff some integer m lies strictly inside (lo, hi).
    if (std::floor(lo + tol) + 1.0 < hi - tol) return false;
  }
  return true;
}

std::vector<double> width_function(const ChainState& state) {
  const auto& u = state.positions();
  const Winding& w = state.winding();
  std::vector<double> out(u.size());
  double a0 = INFINITY;
  for (std::size_t j = 0; j < u.size(); ++j) {
    out[j] = u[j] - w.line(static_cast<std::int64_t>(j));
    a0 = std::min(a0, out[j]);
  }
  for (double& x : out) x -= a0;
  return out;
}

double max_width(const ChainState& state) {
  const auto w = width_function(state);
  return *std::max_element(w.begin(), w.end());
}

ChainState translated(const ChainState& state, double shift) {
  std::vector<double> u = state.positions();
  for (double& x : u) x += shift;
  return ChainState(std::move(u), state.winding(), state.time());
}

void write_checkpoint(std::ostream& out, const ChainState& state, std::uint64_t hash) {
  char buf[64];
  out << "# fkratchet checkpoint\n";
  out << "p " << state.winding().p << "\n";
  out << "q " << state.winding().q << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", state.time());
  out << "time " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  out << "model_hash " << buf << "\n";
  const auto& u = state.positions();
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", u[i]);
    out << i << " " << buf << "\n";
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line[0] != '#') return line;
    }
    throw ConfigError("checkpoint truncated", line_no);
  };
  auto field = [&](const char* key) -> std::string {
    std::istringstream ss(next());
    std::string k, v;
    if (!(ss >> k >> v) || k != key) {
      throw ConfigError(std::string("checkpoint: expected '") + key + "'", line_no);
    }
    return v;
  };
  Winding w;
  double time = 0.0;
  std::uint64_t hash = 0;
  try {
    w.p = std::stoll(field("p"));
    w.q = std::stoll(field("q"));
    time = std::stod(field("time"));
    hash = std::stoull(field("model_hash"), nullptr, 16);
  } catch (const std::logic_error&) {
    throw ConfigError("checkpoint: malformed header value", line_no);
  }
  if (w.q < 1 || w.q > (1 << 24)) throw ConfigError("checkpoint: bad q", line_no);
  std::vector<double> u(static_cast<std::size_t>(w.q));
  for (std::int64_t i = 0; i < w.q; ++i) {
    std::istringstream ss(next());
    std::int64_t idx = -1;
    std::string value;
    if (!(ss >> idx >> value) || idx != i) {
      throw ConfigError("checkpoint: expected site " + std::to_string(i), line_no);
    }
    u[static_cast<std::size_t>(i)] = std::strtod(value.c_str(), nullptr);
  }
  return {ChainState(std::move(u), w, time), hash};
}

std::uint64_t model_hash(const ModelSpec& model) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : model.canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace fkr
