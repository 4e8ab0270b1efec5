#pragma once

#include <string>

namespace fkr {

struct BoundInputs {
  double alpha = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  double c_rho = 0.0;
  double epsilon = 0.0;

  void validate() const;
};

// Lower bound on the transport speed:
//   (1/tau) (alpha - g + g^2/2 - [(1/2 - beta tau - alpha - g) v 0]^2 / 2),
// g = min(gamma_{rho,tau}, 1). Negative values carry no information and are
// returned unchanged; callers label them vacuous.
double theorem1_bound(const BoundInputs& b);

// On-phase floor with d1(mu*, lambda) <= epsilon:
//   alpha - 2 eps^(1/2) + 2 eps - [(1/2 + alpha - beta tau - 2 s^(1/2)) v 0]^2 / 2,
// where the transported mass s is replaced by its upper bound min(2 eps^(1/2), 1)
// and 2 eps^(1/2) - 2 eps is read as s - s^2/2.
double on_phase_floor(double alpha, double beta, double tau, double epsilon);

// Explicit part of the generic-rho bound
//   (1/tau) [alpha - (3 C (gamma_L + eps + 1))^(1/2) tau^(-1/8)];
// the o(tau^(-1/8)) remainder is unknown and reported as such.
struct GenericBound {
  double value = 0.0;
  double leading_coefficient = 0.0;  // (3 C (gamma_L + eps + 1))^(1/2)
  std::string remainder = "o(tau^-1/8): unknown";
};

GenericBound corollary_generic_bound(double alpha, double c_rho, double tau, double eps_margin);

// Heuristic work-maximising half-period C^4 / alpha^8 (order of magnitude only).
double optimal_tau(double c_rho, double alpha);

// Golden-mean specialisation (1/tau)(alpha - 3 C^(1/2) tau^(-1/8)), valid for
// tau > max((1/2 - alpha)/beta, C^2). Throws ArgumentError outside that range.
// theorem1_exact is the general bound with the exact Fibonacci gamma at the
// same parameters, for comparison.
struct GoldenMeanBound {
  double value = 0.0;
  double theorem1_exact = 0.0;

  bool consistent(double slack = 1e-12) const { return value <= theorem1_exact + slack; }
};

GoldenMeanBound golden_mean_bound(double c_rho, double alpha, double beta, double tau);

}  // namespace fkr
