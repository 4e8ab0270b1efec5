#include "fkratchet/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "fkratchet/errors.hpp"
#include "fkratchet/numtheory.hpp"

namespace fkr {

namespace {

double clamp_term(double x) {
  const double c = std::max(x, 0.0);
  return 0.5 * c * c;
}

}  // namespace

void BoundInputs::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ArgumentError("bound needs alpha in (0, 1/2)");
  if (!(beta >= 0.0)) throw ArgumentError("bound needs beta >= 0");
  if (!(tau > 0.0)) throw ArgumentError("bound needs tau > 0");
  if (!(gamma >= 0.0)) throw ArgumentError("bound needs gamma >= 0");
  if (!(epsilon >= 0.0)) throw ArgumentError("bound needs epsilon >= 0");
}

double theorem1_bound(const BoundInputs& b) {
  b.validate();
  // The transported-mass substitution only holds up to mass 1; past that the
  // floor stays at its value there, alpha - 1/2.
  const double g = std::min(b.gamma, 1.0);
  return (b.alpha - g + 0.5 * g * g - clamp_term(0.5 - b.beta * b.tau - b.alpha - g)) / b.tau;
}

double on_phase_floor(double alpha, double beta, double tau, double epsilon) {
  if (!(epsilon >= 0.0)) throw ArgumentError("on_phase_floor needs epsilon >= 0");
  const double moved = std::min(2.0 * std::sqrt(epsilon), 1.0);
  return alpha - moved + 0.5 * moved * moved -
         clamp_term(0.5 + alpha - beta * tau - 2.0 * std::sqrt(moved));
}

GenericBound corollary_generic_bound(double alpha, double c_rho, double tau, double eps_margin) {
  if (!(tau > 0.0)) throw ArgumentError("generic bound needs tau > 0");
  if (!(c_rho > 0.0)) throw ArgumentError("generic bound needs C_rho > 0");
  if (!(eps_margin >= 0.0)) throw ArgumentError("generic bound needs eps_margin >= 0");
  GenericBound out;
  out.leading_coefficient = std::sqrt(3.0 * c_rho * (levy_constant() + eps_margin + 1.0));
  out.value = (alpha - out.leading_coefficient * std::pow(tau, -0.125)) / tau;
  return out;
}

double optimal_tau(double c_rho, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("optimal_tau needs alpha > 0");
  const double c2 = c_rho * c_rho;
  return c2 * c2 / std::pow(alpha, 8.0);
}

GoldenMeanBound golden_mean_bound(double c_rho, double alpha, double beta, double tau) {
  if (!(c_rho > 0.0)) throw ArgumentError("golden-mean bound needs C_rho > 0");
  if (!(beta > 0.0)) throw ArgumentError("golden-mean bound needs beta > 0");
  const double threshold = std::max((0.5 - alpha) / beta, c_rho * c_rho);
  if (!(tau > threshold)) {
    throw ArgumentError("golden-mean bound needs tau > max((1/2 - alpha)/beta, C_rho^2)");
  }
  GoldenMeanBound out;
  out.value = (alpha - 3.0 * std::sqrt(c_rho) * std::pow(tau, -0.125)) / tau;
  const ConvergentSeq fib = continued_fraction(QuadraticIrrational::golden_mean, 92);
  const double gamma = gamma_rho_tau(fib, GammaParams{c_rho, tau});
  out.theorem1_exact = theorem1_bound(BoundInputs{alpha, beta, tau, gamma, c_rho, 0.0});
  return out;
}

}  // namespace fkr
