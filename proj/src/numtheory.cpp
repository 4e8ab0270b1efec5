#include "fkratchet/numtheory.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fkratchet/errors.hpp"

namespace fkr {

namespace {

bool mul_add(std::int64_t a, std::int64_t x, std::int64_t b, std::int64_t& out) {
  std::int64_t prod = 0;
  if (__builtin_mul_overflow(a, x, &prod)) return false;
  return !__builtin_add_overflow(prod, b, &out);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t d = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
  return d;
}

// Appends a_n and the convergent it produces. False on overflow or when the
// denominator would exceed q_cap.
struct Expander {
  ConvergentSeq& seq;
  std::int64_t q_cap;
  std::int64_t p1 = 1, q1 = 0, p2 = 0, q2 = 1;  // p_{n-1}, q_{n-1}, p_{n-2}, q_{n-2}

  bool push(std::int64_t a) {
    std::int64_t p = 0, q = 0;
    if (!mul_add(a, p1, p2, p) || !mul_add(a, q1, q2, q)) return false;
    if (q > q_cap) return false;
    seq.terms.push_back(a);
    seq.convergents.push_back(Rational{p, q});
    p2 = p1;
    q2 = q1;
    p1 = p;
    q1 = q;
    return true;
  }
};

}  // namespace

Rational Rational::make(std::int64_t p, std::int64_t q) {
  if (q == 0) throw ArgumentError("rational with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p, q);
  return Rational{p / g, q / g};
}

std::string Rational::str() const { return std::to_string(p) + "/" + std::to_string(q); }

RhoSpec parse_rho(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += static_cast<char>(std::tolower(c));
  }
  if (text == "golden" || text == "phi" || text == "golden_mean") {
    return QuadraticIrrational::golden_mean;
  }
  if (text == "sqrt2") return QuadraticIrrational::sqrt2;
  if (text.empty()) throw ArgumentError("empty mean spacing");
  auto parse_int = [&](const std::string& s) -> std::int64_t {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw ArgumentError("cannot parse mean spacing '" + raw + "'");
    }
    if (used != s.size()) throw ArgumentError("cannot parse mean spacing '" + raw + "'");
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    return Rational::make(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (const auto dot = text.find('.'); dot != std::string::npos &&
                                       text.find_first_of("eE") == std::string::npos) {
    // Decimal literal: keep it exact as digits / 10^k.
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t places = text.size() - dot - 1;
    if (places > 17) throw ArgumentError("too many decimal places in '" + raw + "'");
    if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
    std::int64_t den = 1;
    for (std::size_t i = 0; i < places; ++i) den *= 10;
    return Rational::make(parse_int(digits), den);
  }
  if (text.find_first_of("eE") != std::string::npos) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ArgumentError("cannot parse mean spacing '" + raw + "'");
  }
  return Rational{parse_int(text), 1};
}

std::string to_string(const RhoSpec& rho) {
  if (const auto* r = std::get_if<Rational>(&rho)) return r->str();
  if (const auto* s = std::get_if<QuadraticIrrational>(&rho)) {
    return *s == QuadraticIrrational::golden_mean ? "golden" : "sqrt2";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(rho));
  return buf;
}

double rho_value(const RhoSpec& rho) {
  if (const auto* r = std::get_if<Rational>(&rho)) return r->value();
  if (const auto* s = std::get_if<QuadraticIrrational>(&rho)) {
    return *s == QuadraticIrrational::golden_mean ? std::numbers::phi : std::numbers::sqrt2;
  }
  return std::get<double>(rho);
}

ConvergentSeq continued_fraction(const RhoSpec& rho, int max_terms, std::int64_t q_cap) {
  if (max_terms < 1) throw ArgumentError("continued_fraction needs max_terms >= 1");
  if (q_cap < 1) throw ArgumentError("continued_fraction needs q_cap >= 1");
  ConvergentSeq seq;
  seq.rho = rho_value(rho);
  Expander ex{seq, q_cap};

  if (const auto* r = std::get_if<Rational>(&rho)) {
    std::int64_t num = r->p, den = r->q;
    while (static_cast<int>(seq.terms.size()) < max_terms) {
      const std::int64_t a = floor_div(num, den);
      if (!ex.push(a)) return seq;
      const std::int64_t rem = num - a * den;
      if (rem == 0) {
        seq.terminated = true;
        return seq;
      }
      num = den;
      den = rem;
    }
    return seq;
  }

  if (const auto* s = std::get_if<QuadraticIrrational>(&rho)) {
    const std::int64_t tail = *s == QuadraticIrrational::golden_mean ? 1 : 2;
    for (int n = 0; n < max_terms; ++n) {
      if (!ex.push(n == 0 ? 1 : tail)) break;
    }
    return seq;
  }

  // Floating input. err bounds |x_n - exact remainder|; the next partial
  // quotient is trusted only while floor(x - err) == floor(x + err).
  const double x0 = std::get<double>(rho);
  if (!std::isfinite(x0)) throw ArgumentError("mean spacing must be finite");
  long double x = x0;
  long double err = std::abs(x) * std::numeric_limits<double>::epsilon();
  while (static_cast<int>(seq.terms.size()) < max_terms) {
    const long double fl = std::floor(x);
    if (std::floor(x - err) != std::floor(x + err)) {
      // Remainder within rounding of an integer: accept it only if the
      // resulting rational rounds back to the input exactly.
      const long double n = std::nearbyint(x);
      if (std::abs(x - n) <= err && n >= 1 &&
          n < static_cast<long double>(std::numeric_limits<std::int64_t>::max() / 4)) {
        const auto a = static_cast<std::int64_t>(n);
        std::int64_t p = 0, q = 0;
        if (mul_add(a, ex.p1, ex.p2, p) && mul_add(a, ex.q1, ex.q2, q) && q <= q_cap &&
            static_cast<double>(p) / static_cast<double>(q) == x0 && ex.push(a)) {
          seq.terminated = true;
        }
      }
      break;
    }
    if (fl > static_cast<long double>(std::numeric_limits<std::int64_t>::max() / 4)) break;
    if (!ex.push(static_cast<std::int64_t>(fl))) break;
    const long double f = x - fl;
    if (f <= err) break;
    x = 1.0L / f;
    err = err / (f * (f - err)) + std::abs(x) * std::numeric_limits<long double>::epsilon();
  }
  return seq;
}

Rational best_approximant(const RhoSpec& rho, std::int64_t q_max) {
  const ConvergentSeq seq = continued_fraction(rho, 256, q_max);
  if (seq.convergents.empty()) throw ArgumentError("no convergent with q <= q_max");
  return seq.convergents.back();
}

double gamma_rho_tau(const ConvergentSeq& seq, const GammaParams& g) {
  if (seq.convergents.empty()) throw ArgumentError("gamma needs a nonempty convergent sequence");
  if (!(g.c_rho > 0.0)) throw ArgumentError("gamma needs C_rho > 0");
  if (!(g.tau > 0.0)) throw ArgumentError("gamma needs tau > 0");
  const double root_tau = std::sqrt(g.tau);
  const double cap = 1.0 + root_tau / g.c_rho;
  auto term = [&](std::int64_t q) {
    const double qd = static_cast<double>(q);
    return g.c_rho * qd / root_tau + 1.0 / qd;
  };
  double best = term(seq.convergents.front().q);
  bool reached_cap = false;
  for (const auto& c : seq.convergents) {
    if (static_cast<double>(c.q) >= cap) {
      reached_cap = true;
      break;
    }
    best = std::min(best, term(c.q));
  }
  if (!reached_cap && !seq.terminated) {
    throw ArgumentError("convergent sequence stops below the scan cap 1 + sqrt(tau)/C_rho");
  }
  return std::sqrt(3.0) * std::sqrt(best);
}

double levy_constant() {
  return std::exp(std::numbers::pi * std::numbers::pi / (12.0 * std::numbers::ln2));
}

double c_rho(double delta_minus, double delta_plus) {
  if (!(delta_minus > 0.0)) throw ArgumentError("C_rho needs delta_minus > 0");
  return 2.0 * std::sqrt(6.0) * delta_plus / (3.0 * std::pow(delta_minus, 1.5));
}

}  // namespace fkr
