#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fkratchet/potentials.hpp"

namespace fkr {

// Boundary condition u_{k+q} = u_k + p, gcd(p, q) = 1, q >= 1.
struct Winding {
  std::int64_t p = 0;
  std::int64_t q = 1;

  double rho() const noexcept { return static_cast<double>(p) / static_cast<double>(q); }
  // rho * k without forming rho first: exact whenever p * k fits a double.
  double line(std::int64_t k) const noexcept {
    return static_cast<double>(p * k) / static_cast<double>(q);
  }
  bool operator==(const Winding&) const = default;
};

// One periodic cell of a (p, q) configuration. Positions live in the
// covering space: no reduction mod 1 ever happens.
class ChainState {
 public:
  ChainState(std::vector<double> positions, Winding winding, double time = 0.0);

  // u_k = rho k + offset.
  static ChainState straight_line(Winding winding, double offset = 0.0);

  const std::vector<double>& positions() const noexcept { return positions_; }
  std::vector<double>& positions() noexcept { return positions_; }
  const Winding& winding() const noexcept { return winding_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  std::int64_t q() const noexcept { return winding_.q; }
  double rho() const noexcept { return winding_.rho(); }

  // u_k for any integer k: positions[k mod q] + p floor(k / q).
  double at(std::int64_t k) const noexcept;

 private:
  std::vector<double> positions_;
  Winding winding_;
  double time_;
};

enum class DynamicsMode {
  pulsating_potential,    // du_k/dt = W'(u_{k+1}-u_k) - W'(u_k-u_{k-1}) + K(t) V'(u_k)
  pulsating_interaction,  // du_k/dt = K(t) [W'(u_{k+1}-u_k) - W'(u_k-u_{k-1})] + V'(u_k)
};

const char* to_string(DynamicsMode mode) noexcept;

struct IntegratorConfig {
  enum class Scheme { rk4 };

  double dt_max = 0.05;
  Scheme scheme = Scheme::rk4;
  double safety = 1.0;  // in (0, 1]
  double max_steps = 1e11;

  void validate() const;
};

// Step actually used: min(dt_max, safety / (4 delta+ + kappa max|V''|)) for the
// potential mode, with the roles of kappa swapped for the interaction mode.
// Each half-period is then cut into ceil(tau / dt) equal steps.
double stable_step(const ModelSpec& model, DynamicsMode mode, const IntegratorConfig& cfg,
                   double rho);

// Right-hand side at time t; K(t) taken from the pulse.
std::vector<double> rhs(const ChainState& state, double t, const ModelSpec& model,
                        DynamicsMode mode);

// Same, with the pulse amplitude supplied directly. out.size() == q.
void rhs_with_pulse(std::span<const double> positions, const Winding& winding, double pulse,
                    const ModelSpec& model, DynamicsMode mode, std::span<double> out);

// Fixed-step RK4 from state.time() to t_end. Pulse switch times always fall on
// step boundaries.
ChainState evolve(const ChainState& state, double t_end, const ModelSpec& model,
                  DynamicsMode mode, const IntegratorConfig& cfg);

// Poincare map T = evolve by one full period 2 tau. state.time() must be a
// multiple of 2 tau.
ChainState poincare(const ChainState& state, const ModelSpec& model, DynamicsMode mode,
                    const IntegratorConfig& cfg);

// Evolves u0 >= v0 for time t. Returns true iff u(t) > v(t) strictly at every
// site, or, when u0 == v0, iff they are still identical.
bool check_order_preserved(const ChainState& u0, const ChainState& v0, double t,
                           const ModelSpec& model, DynamicsMode mode, const IntegratorConfig& cfg);

// True iff for every n and integer m, u and S^n u + m are comparable, with
// crossings smaller than tol ignored (clustered particles sit on integers).
bool check_rotational_order(const ChainState& state, double tol = 1e-9);

// w_j = u_j - rho j - a0 with a0 = min_j (u_j - rho j), j = 0..q-1.
std::vector<double> width_function(const ChainState& state);

double max_width(const ChainState& state);

// u + shift in every coordinate.
ChainState translated(const ChainState& state, double shift);

// Checkpoint text format:
//   # fkratchet checkpoint
//   p <p>
//   q <q>
//   time <t>
//   model_hash <16 hex digits>
//   <index> <position>      (q lines)
// Numbers use 17 significant digits, so a write/read cycle is exact.
void write_checkpoint(std::ostream& out, const ChainState& state, std::uint64_t model_hash);

struct Checkpoint {
  ChainState state;
  std::uint64_t model_hash;
};

Checkpoint read_checkpoint(std::istream& in);

// FNV-1a over ModelSpec::canonical().
std::uint64_t model_hash(const ModelSpec& model);

}  // namespace fkr
