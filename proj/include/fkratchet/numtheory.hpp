#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fkr {

// Reduced fraction p/q with q > 0.
struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;

  static Rational make(std::int64_t p, std::int64_t q);
  double value() const noexcept { return static_cast<double>(p) / static_cast<double>(q); }
  std::string str() const;
  bool operator==(const Rational&) const = default;
};

// Quadratic irrationals whose periodic expansions are known exactly.
enum class QuadraticIrrational {
  golden_mean,  // (1 + sqrt 5)/2 = [1; 1, 1, ...]
  sqrt2,        // [1; 2, 2, ...]
};

// A mean spacing as accepted on the command line and in configs.
using RhoSpec = std::variant<Rational, QuadraticIrrational, double>;

// "13/21", "3", "-2/7", "0.618" (decimal, kept exact), "golden", "sqrt2".
RhoSpec parse_rho(const std::string& text);
std::string to_string(const RhoSpec& rho);
double rho_value(const RhoSpec& rho);

struct ConvergentSeq {
  double rho = 0.0;
  std::vector<std::int64_t> terms;     // a_0; a_1, a_2, ...
  std::vector<Rational> convergents;   // p_n / q_n
  // True when the expansion is complete (rational input fully expanded).
  bool terminated = false;
};

// Exact Euclidean expansion for rationals, exact periodic expansion for the
// quadratic irrationals, guarded floating expansion for doubles. Stops after
// max_terms partial quotients, before the first denominator above q_cap, or
// (double input only) as soon as the accumulated rounding bound could change
// the next partial quotient.
ConvergentSeq continued_fraction(const RhoSpec& rho, int max_terms = 64,
                                 std::int64_t q_cap = std::int64_t{1} << 53);

// Last convergent with denominator <= q_max.
Rational best_approximant(const RhoSpec& rho, std::int64_t q_max);

struct GammaParams {
  double c_rho = 0.0;
  double tau = 0.0;
};

// sqrt(3) min_n (C q_n / sqrt(tau) + 1/q_n)^(1/2) over convergents with
// q_n < 1 + sqrt(tau) / C, the first convergent always included. Throws
// ArgumentError when an unterminated sequence stops below that cap.
double gamma_rho_tau(const ConvergentSeq& seq, const GammaParams& g);

// exp(pi^2 / (12 ln 2))
double levy_constant();

// 2 sqrt(6) delta+ / (3 (delta-)^(3/2)); delta- <= 0 throws ArgumentError.
double c_rho(double delta_minus, double delta_plus);

}  // namespace fkr
