#pragma once

#include <vector>

#include "fkratchet/chain.hpp"
#include "fkratchet/potentials.hpp"

namespace fkr {

// Uniform probability over the q cyclic shifts S^k u of one cell. Every
// integral against it is an exact finite average over k = 0..q-1.
struct EmpiricalMeasure {
  ChainState base;

  explicit EmpiricalMeasure(ChainState state) : base(std::move(state)) {}
};

struct CircleAtom {
  double position = 0.0;  // in [0, 1)
  double weight = 0.0;
};

// Atomic probability measure on the unit circle, atoms sorted by position.
class CircleMeasure {
 public:
  CircleMeasure() = default;
  // Sorts atoms; throws ArgumentError unless positions lie in [0, 1), weights
  // are nonnegative and sum to 1 within 1e-12.
  explicit CircleMeasure(std::vector<CircleAtom> atoms);

  // q atoms of weight 1/q at (offset + k/q) mod 1.
  static CircleMeasure equally_spaced(int q, double offset = 0.0);

  const std::vector<CircleAtom>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<CircleAtom> atoms_;
};

// (1/q) sum_k (u_{k+1} - u_k - rho)^2
double avg_width(const EmpiricalMeasure& mu);

// (1/q) sum_k W(u_{k+1} - u_k)
double energy(const EmpiricalMeasure& mu, const InteractionPotential& W);

// sqrt of the cell's own average squared spacing deviation.
double v_q_statistic(const ChainState& state);

// (1/q) sum_k (u_{k+1} - 2 u_k + u_{k-1})^2
double second_difference_msq(const EmpiricalMeasure& mu);

// (1/q) sum_k (W'(u_{k+1} - u_k) - W'(u_k - u_{k-1}))^2
double force_difference_msq(const EmpiricalMeasure& mu, const InteractionPotential& W);

// Atoms at u_k mod 1 with weight 1/q; positions within 1e-12 merge.
CircleMeasure project_circle(const EmpiricalMeasure& mu);

// L1-Wasserstein distance on the circle with arc-length cost:
//   min_c int_0^1 |F_mu(x) - F_nu(x) - c| dx,
// c the Lebesgue median of F_mu - F_nu, evaluated exactly on the piecewise
// constant CDF difference.
double w1_circle(const CircleMeasure& mu, const CircleMeasure& nu);

// Same formula against Lebesgue measure (F_nu(x) = x); the integrand is
// piecewise linear and integrated exactly.
double w1_to_lebesgue(const CircleMeasure& mu);

// (1/q) sum_k (after_k - before_k); both cells must share the winding.
double mean_displacement(const EmpiricalMeasure& before, const EmpiricalMeasure& after);

}  // namespace fkr
