#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fkr {

// Nearest-neighbour interaction W. Both supported kinds are even polynomials
// in the spacing, so W'' is available in closed form.
class InteractionPotential {
 public:
  enum class Kind { quadratic, quadratic_plus_quartic };

  // W(x) = c x^2, c > 0.
  static InteractionPotential quadratic(double c);
  // W(x) = c2 x^2 + c4 x^4, c2 > 0, c4 >= 0.
  static InteractionPotential quadratic_plus_quartic(double c2, double c4);

  Kind kind() const noexcept { return kind_; }
  double c2() const noexcept { return c2_; }
  double c4() const noexcept { return c4_; }

  double value(double x) const noexcept { return x * x * (c2_ + c4_ * x * x); }
  double first(double x) const noexcept { return x * (2.0 * c2_ + 4.0 * c4_ * x * x); }
  double second(double x) const noexcept { return 2.0 * c2_ + 12.0 * c4_ * x * x; }

  std::string describe() const;

 private:
  InteractionPotential(Kind kind, double c2, double c4) : kind_(kind), c2_(c2), c4_(c4) {}

  Kind kind_;
  double c2_;
  double c4_;
};

struct FourierTerm {
  double amplitude = 0.0;
  double phase = 0.0;
};

// 1-periodic site potential V(x) = sum_m a_m sin(2 pi m x + phi_m), m = 1..M.
// Evaluation reduces x mod 1 first, so V(x + 1) == V(x) up to the rounding
// of x + 1 itself.
class SitePotential {
 public:
  SitePotential() = default;
  explicit SitePotential(std::vector<FourierTerm> terms);

  const std::vector<FourierTerm>& terms() const noexcept { return terms_; }

  double value(double x) const noexcept;
  double first(double x) const noexcept;
  double second(double x) const noexcept;

  // sum_m |a_m| (2 pi m)^2, an upper bound for |V''| on the whole circle.
  double second_derivative_bound() const noexcept;

  std::string describe() const;

 private:
  std::vector<FourierTerm> terms_;
  std::vector<double> cos_phase_;
  std::vector<double> sin_phase_;
};

// Step pulse K(t): 0 on [2n tau, (2n+1) tau), kappa on [(2n+1) tau, (2n+2) tau).
struct PulseSpec {
  double tau = 1.0;
  double kappa = 0.0;

  void validate() const;
};

// K(t), right-continuous at the switch times.
double pulse_value(const PulseSpec& pulse, double t);

struct ModelSpec {
  InteractionPotential W = InteractionPotential::quadratic(1.0);
  SitePotential V;
  PulseSpec pulse;

  void validate() const;
  // Canonical text form, used for hashing checkpoints.
  std::string canonical() const;
};

// Shipped model: W(x) = x^2, a four-harmonic ratchet V whose derivative is
// 1 - F_5 (F_5 the Fejer kernel), kappa = 5, tau = 10.
ModelSpec default_model();

struct DeltaBounds {
  double delta_minus = 0.0;
  double delta_plus = 0.0;
};

// Min and max of W'' over [rho - 1, rho + 1], closed form for both kinds.
DeltaBounds delta_bounds(const InteractionPotential& W, double rho);

struct AsymmetryParams {
  double alpha = 0.0;
  double beta = 0.0;
  double a = 0.0;  // interval start in [0, 1)
  double b = 0.0;  // interval end, a < b < a + 1
  double delta_minus = 0.0;
  double delta_plus = 0.0;
};

// Objective used to pick among the (alpha, beta) candidates.
using AsymmetryScore = std::function<double(double alpha, double beta)>;

// Prefers the longest certified interval, i.e. the largest alpha.
double score_by_alpha(double alpha, double beta);

// Scans a logarithmic grid of beta values; for each, finds the longest arc
// [a, b] of the circle on which kappa V'(x) >= delta_plus + beta holds at every
// grid point with a margin covering the worst case between grid points, and
// sets alpha = (b - a) - 1/2. Only deltas.delta_plus enters the condition;
// delta_minus is carried into the result. Returns the candidate maximising `score`, or
// nullopt when no arc longer than 1/2 exists for any beta > 0.
// Certified only at the resolution of grid_n (>= 1000).
std::optional<AsymmetryParams> extract_asymmetry(const SitePotential& V, double kappa,
                                                 const DeltaBounds& deltas, int grid_n,
                                                 const AsymmetryScore& score = score_by_alpha);

}  // namespace fkr
