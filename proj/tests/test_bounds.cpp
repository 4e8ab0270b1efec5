#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fkratchet/bounds.hpp"
#include "fkratchet/errors.hpp"
#include "fkratchet/numtheory.hpp"

using namespace fkr;

TEST_SUITE("bounds") {

TEST_CASE("speed bound examples") {
  CHECK(theorem1_bound({0.3, 0.1, 5.0, 0.0, 1.0, 0.0}) == doctest::Approx(0.3 / 5.0).epsilon(1e-15));
  // Clamp active: 0.5 - 5 - 0.3 - 0.4 < 0, so only the first three terms.
  CHECK(theorem1_bound({0.3, 0.05, 100.0, 0.4, 1.0, 0.0}) == doctest::Approx(-0.0002).epsilon(1e-12));
  // Clamp biting: beta tau small.
  const double clamp = 0.5 - 0.01 * 2.0 - 0.2 - 0.1;
  CHECK(theorem1_bound({0.2, 0.01, 2.0, 0.1, 1.0, 0.0}) ==
        doctest::Approx((0.2 - 0.1 + 0.005 - 0.5 * clamp * clamp) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(theorem1_bound({0.5, 0.1, 1.0, 0.0, 1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(theorem1_bound({0.2, 0.1, 0.0, 0.0, 1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(theorem1_bound({0.2, -0.1, 1.0, 0.0, 1.0, 0.0}), ArgumentError);
}

TEST_CASE("integer spacing never yields a positive bound") {
  const auto seq = continued_fraction(Rational{2, 1});
  for (double tau = 0.01; tau < 1e12; tau *= 2.3) {
    const double g = gamma_rho_tau(seq, {1.1547, tau});
    CHECK(g > std::sqrt(3.0));
    for (double alpha = 0.01; alpha < 0.5; alpha += 0.04) {
      for (double beta : {0.0, 0.01, 1.0, 100.0}) {
        CHECK(theorem1_bound({alpha, beta, tau, g, 1.1547, 0.0}) < 0.0);
      }
    }
  }
}

TEST_CASE("speed bound monotonicity where the clamp is inactive") {
  for (double gamma = 0.0; gamma < 3.0; gamma += 0.05) {
    for (double alpha = 0.02; alpha < 0.48; alpha += 0.05) {
      const BoundInputs b{alpha, 10.0, 1.0, gamma, 1.0, 0.0};
      BoundInputs more_alpha = b, more_gamma = b;
      more_alpha.alpha += 0.01;
      more_gamma.gamma += 0.05;
      CHECK(theorem1_bound(more_alpha) >= theorem1_bound(b));
      CHECK(theorem1_bound(more_gamma) <= theorem1_bound(b));
    }
  }
}

TEST_CASE("positive bound for q >= 3 / alpha^2 at large tau") {
  const double alpha = 0.25, beta = 0.01, c = 1.1547;
  const auto q_min = static_cast<std::int64_t>(std::ceil(3.0 / (alpha * alpha)));
  for (std::int64_t q : {q_min, q_min + 1, 2 * q_min + 1}) {
    const auto seq = continued_fraction(Rational::make(1, q));
    bool positive = false;
    for (double tau = 1.0; tau <= 1e16 && !positive; tau *= 10.0) {
      positive = theorem1_bound({alpha, beta, tau, gamma_rho_tau(seq, {c, tau}), c, 0.0}) > 0.0;
    }
    CHECK(positive);
  }
}

TEST_CASE("on-phase floor") {
  CHECK(on_phase_floor(0.3, 1.0, 1.0, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
  for (int i = 1; i < 10; ++i) {
    const double alpha = 0.05 * i;
    CHECK(on_phase_floor(alpha, 0.0, 1.0, 0.25) <= alpha - 1.0 + 0.5);
    CHECK(on_phase_floor(alpha, 0.0, 1.0, 0.25) < 0.0);
  }
  CHECK_THROWS_AS(on_phase_floor(0.3, 1.0, 1.0, -1e-3), ArgumentError);
  // Inserting epsilon = gamma^2/4 reproduces the speed bound when both clamps vanish.
  for (double gamma : {0.0, 0.1, 0.3, 0.7, 1.0, 1.5}) {
    const double tau = 50.0, alpha = 0.2, beta = 1.0;
    CHECK(on_phase_floor(alpha, beta, tau, gamma * gamma / 4) / tau ==
          doctest::Approx(theorem1_bound({alpha, beta, tau, gamma, 1.0, 0.0})).epsilon(1e-13));
  }
}

TEST_CASE("generic bound") {
  const double c = 2 * std::sqrt(6.0) / 3;
  const GenericBound g = corollary_generic_bound(0.3, c, 1e4, 0.0);
  CHECK(g.leading_coefficient == doctest::Approx(4.578).epsilon(1e-3));
  CHECK(g.remainder.find("unknown") != std::string::npos);
  CHECK(corollary_generic_bound(0.3, c, 1e4, 0.5).value < g.value);
  double last_ratio = -1e300;
  for (double tau = 1e4; tau < 1e60; tau *= 1e8) {
    const double ratio = corollary_generic_bound(0.3, c, tau, 0.0).value * tau / 0.3;
    CHECK(ratio > last_ratio);
    last_ratio = ratio;
  }
  CHECK(last_ratio == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("optimal tau") {
  CHECK(optimal_tau(1.0, 0.5) == doctest::Approx(256.0).epsilon(1e-15));
  CHECK(optimal_tau(2.0, 0.3) == doctest::Approx(16.0 * optimal_tau(1.0, 0.3)).epsilon(1e-14));
  CHECK(optimal_tau(1.3, 0.15) == doctest::Approx(256.0 * optimal_tau(1.3, 0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(optimal_tau(1.0, 0.0), ArgumentError);
}

TEST_CASE("golden-mean bound") {
  CHECK(golden_mean_bound(1.0, 0.3, 0.1, 1e8).value == doctest::Approx(0.0).scale(1e-8));
  CHECK_THROWS_AS(golden_mean_bound(1.0, 0.3, 0.1, 1.5), ArgumentError);
  CHECK_THROWS_AS(golden_mean_bound(2.0, 0.3, 1.0, 3.9), ArgumentError);
  // Never above the exact Fibonacci evaluation on its domain, for C_rho >= 1.
  for (double c : {1.0, 1.1547, 2.0}) {
    for (double alpha : {0.1, 0.25, 0.45}) {
      for (double tau = 10.0; tau < 1e15; tau *= 3.0) {
        if (tau <= std::max((0.5 - alpha) / 0.05, c * c)) continue;
        CHECK(golden_mean_bound(c, alpha, 0.05, tau).consistent(1e-12));
      }
    }
  }
}

}  // TEST_SUITE
