#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "fkratchet/errors.hpp"
#include "fkratchet/numtheory.hpp"
#include "support/oracles.hpp"

using namespace fkr;

TEST_SUITE("numtheory") {

TEST_CASE("parsing mean spacings") {
  CHECK(std::get<Rational>(parse_rho("13/21")) == Rational{13, 21});
  CHECK(std::get<Rational>(parse_rho("26/42")) == Rational{13, 21});
  CHECK(std::get<Rational>(parse_rho("-2/7")) == Rational{-2, 7});
  CHECK(std::get<Rational>(parse_rho("3")) == Rational{3, 1});
  CHECK(std::get<Rational>(parse_rho("0.618")) == Rational{309, 500});
  CHECK(std::get<QuadraticIrrational>(parse_rho("golden")) == QuadraticIrrational::golden_mean);
  CHECK(std::get<QuadraticIrrational>(parse_rho("sqrt2")) == QuadraticIrrational::sqrt2);
  CHECK(std::get<double>(parse_rho("6.18e-1")) == 0.618);
  CHECK_THROWS_AS(parse_rho("1/0"), ArgumentError);
  CHECK_THROWS_AS(parse_rho("abc"), ArgumentError);
  CHECK_THROWS_AS(parse_rho(""), ArgumentError);
}

TEST_CASE("expansion examples") {
  const auto golden = continued_fraction(QuadraticIrrational::golden_mean, 20);
  std::int64_t a = 1, b = 1;
  for (std::size_t n = 0; n < golden.terms.size(); ++n) {
    CHECK(golden.terms[n] == 1);
    CHECK(golden.convergents[n].q == a);
    const std::int64_t c = a + b;
    a = b;
    b = c;
  }
  const auto half = continued_fraction(Rational{1, 2});
  REQUIRE(half.convergents.size() == 2);
  CHECK(half.convergents[0] == Rational{0, 1});
  CHECK(half.convergents[1] == Rational{1, 2});
  CHECK(half.terminated);
  const auto three = continued_fraction(Rational{3, 1});
  REQUIRE(three.convergents.size() == 1);
  CHECK(three.convergents[0] == Rational{3, 1});
  const auto root2 = continued_fraction(QuadraticIrrational::sqrt2, 6);
  CHECK(root2.terms == std::vector<std::int64_t>{1, 2, 2, 2, 2, 2});
  CHECK(root2.convergents.back() == Rational{99, 70});
  const auto neg = continued_fraction(Rational{-7, 3});
  CHECK(neg.terms.front() == -3);
  CHECK(neg.convergents.back() == Rational{-7, 3});
}

TEST_CASE("recurrences, approximation quality and exact termination") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::int64_t> num(-100000, 100000), den(1, 100000);
  for (int t = 0; t < 300; ++t) {
    const Rational r = Rational::make(num(rng), den(rng));
    const auto seq = continued_fraction(r, 200);
    REQUIRE(seq.terminated);
    CHECK(seq.convergents.back() == r);
    for (std::size_t n = 0; n < seq.convergents.size(); ++n) {
      const auto& c = seq.convergents[n];
      if (n >= 1) CHECK(seq.terms[n] >= 1);
      if (n >= 2) {
        CHECK(c.p == seq.terms[n] * seq.convergents[n - 1].p + seq.convergents[n - 2].p);
        CHECK(c.q == seq.terms[n] * seq.convergents[n - 1].q + seq.convergents[n - 2].q);
        CHECK(c.q > seq.convergents[n - 1].q);
      }
      const double err = std::abs(r.value() - c.value());
      CHECK(err <= 1.0 / (double(c.q) * double(c.q)) * (1 + 1e-12));
      // Equality only against the final convergent, which is r itself.
      if (n + 2 < seq.convergents.size()) {
        CHECK(err < 1.0 / (double(c.q) * double(seq.convergents[n + 1].q)) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("floating expansion stops before rounding can change a quotient") {
  const auto seq = continued_fraction(std::numbers::pi, 64);
  const std::vector<std::int64_t> known = {3, 7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14};
  REQUIRE(seq.terms.size() >= 10);
  CHECK(seq.terms.size() < 30);
  for (std::size_t i = 0; i < std::min(seq.terms.size(), known.size()); ++i) {
    CHECK(seq.terms[i] == known[i]);
  }
  const auto exact = continued_fraction(0.5, 64);
  CHECK(exact.convergents.back() == Rational{1, 2});
  const auto capped = continued_fraction(QuadraticIrrational::golden_mean, 200, 1000);
  CHECK(capped.convergents.back().q == 987);
}

TEST_CASE("best approximant") {
  CHECK(best_approximant(QuadraticIrrational::golden_mean, 233) == Rational{377, 233});
  CHECK(best_approximant(QuadraticIrrational::golden_mean, 232) == Rational{233, 144});
  CHECK(best_approximant(Rational{13, 21}, 1000) == Rational{13, 21});
}

TEST_CASE("C_rho") {
  CHECK(c_rho(1.0, 1.0) == doctest::Approx(2 * std::sqrt(6.0) / 3).epsilon(1e-15));
  CHECK(c_rho(2.0, 2.0) == doctest::Approx(2.0 / 3.0 * std::sqrt(3.0)).epsilon(1e-15));
  CHECK(c_rho(2.0, 2.0) == doctest::Approx(1.1547005).epsilon(1e-7));
  for (double c : {0.5, 3.0, 10.0}) {
    CHECK(c_rho(c * 0.7, c * 1.3) == doctest::Approx(c_rho(0.7, 1.3) / std::sqrt(c)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(c_rho(0.0, 1.0), ArgumentError);
}

TEST_CASE("gamma against an exhaustive scan") {
  const auto golden = continued_fraction(QuadraticIrrational::golden_mean, 92);
  const double g = gamma_rho_tau(golden, {1.0, 1e4});
  // Every Fibonacci denominator up to 101, no cap.
  double best = 1e300;
  for (std::int64_t a = 1, b = 1; a <= 101; std::tie(a, b) = std::make_pair(b, a + b)) {
    best = std::min(best, std::sqrt(3.0) * std::sqrt(a / 100.0 + 1.0 / a));
  }
  CHECK(g == doctest::Approx(best).epsilon(1e-15));
  CHECK(g == doctest::Approx(std::sqrt(3.0) * std::sqrt(0.08 + 0.125)).epsilon(1e-15));
  // Example limits.
  CHECK(gamma_rho_tau(continued_fraction(Rational{4, 1}), {1.1547, 1e12}) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-5));
  CHECK(gamma_rho_tau(continued_fraction(Rational{5, 8}), {1.1547, 1e14}) ==
        doctest::Approx(std::sqrt(3.0 / 8.0)).epsilon(1e-5));
  CHECK(gamma_rho_tau(continued_fraction(Rational{4, 1}), {1.0, 1.0}) > std::sqrt(3.0));
}

TEST_CASE("gamma is monotone in tau and invariant under integer shifts") {
  const auto r = continued_fraction(Rational{233, 377});
  const auto r1 = continued_fraction(Rational{233 + 377, 377});
  double last = 1e300;
  for (double tau = 1.0; tau < 1e12; tau *= 3.7) {
    const double g = gamma_rho_tau(r, {1.3, tau});
    CHECK(g <= last);
    CHECK(g == gamma_rho_tau(r1, {1.3, tau}));
    last = g;
  }
}

TEST_CASE("gamma refuses a truncated expansion") {
  const auto short_golden = continued_fraction(QuadraticIrrational::golden_mean, 5);
  CHECK_THROWS_AS(gamma_rho_tau(short_golden, {1.0, 1e8}), ArgumentError);
  CHECK_NOTHROW(gamma_rho_tau(short_golden, {1.0, 1.0}));
  CHECK_THROWS_AS(gamma_rho_tau(short_golden, {0.0, 1.0}), ArgumentError);
}

TEST_CASE("Levy constant") {
  CHECK(levy_constant() == doctest::Approx(3.27582291872).epsilon(1e-11));
  CHECK(std::log(levy_constant()) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / (12 * std::numbers::ln2)).epsilon(1e-15));
  // Random 300-digit rationals behave like random reals for 40 quotients.
  std::mt19937_64 rng(41);
  double sum = 0.0;
  const int samples = 400;
  for (int s = 0; s < samples; ++s) {
    oracle::big num = 0, den = 0;
    for (int w = 0; w < 16; ++w) {
      num = (num << 64) + oracle::big(rng());
      den = (den << 64) + oracle::big(rng());
    }
    if (num > den) std::swap(num, den);
    const auto qs = oracle::cf_denominators(num, den, 41);
    REQUIRE(qs.size() == 41);
    sum += std::log(qs[40].convert_to<double>()) / 40.0;
  }
  const double observed = std::exp(sum / samples);
  CHECK(std::abs(observed / levy_constant() - 1.0) <= 0.10);
  // The library expansion matches the big-integer oracle while it fits.
  const auto small = continued_fraction(Rational{123456789, 987654321});
  const auto ref = oracle::cf_denominators(123456789, 987654321, 100);
  REQUIRE(small.convergents.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(oracle::big(small.convergents[i].q) == ref[i]);
}

}  // TEST_SUITE
