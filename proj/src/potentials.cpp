#include "fkratchet/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fkratchet/errors.hpp"

namespace fkr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Fractional part in [0, 1). x - floor(x) is exact in binary floating point.
double frac(double x) noexcept {
  const double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

}  // namespace

InteractionPotential InteractionPotential::quadratic(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ArgumentError("quadratic interaction needs c > 0");
  }
  return InteractionPotential(Kind::quadratic, c, 0.0);
}

InteractionPotential InteractionPotential::quadratic_plus_quartic(double c2, double c4) {
  if (!(c2 > 0.0) || !std::isfinite(c2)) {
    throw ArgumentError("quadratic-plus-quartic interaction needs c2 > 0");
  }
  if (!(c4 >= 0.0) || !std::isfinite(c4)) {
    throw ArgumentError("quadratic-plus-quartic interaction needs c4 >= 0");
  }
  return InteractionPotential(Kind::quadratic_plus_quartic, c2, c4);
}

std::string InteractionPotential::describe() const {
  if (kind_ == Kind::quadratic) return "W.kind=quadratic;W.c=" + fmt17(c2_);
  return "W.kind=quadratic_plus_quartic;W.c2=" + fmt17(c2_) + ";W.c4=" + fmt17(c4_);
}

SitePotential::SitePotential(std::vector<FourierTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase)) {
      throw ArgumentError("site potential coefficients must be finite");
    }
    cos_phase_.push_back(std::cos(t.phase));
    sin_phase_.push_back(std::sin(t.phase));
  }
}

// Harmonics via the angle-addition recurrence: one sincos per evaluation.
double SitePotential::value(double x) const noexcept {
  if (terms_.empty()) return 0.0;
  const double theta = kTwoPi * frac(x);
  const double s1 = std::sin(theta), c1 = std::cos(theta);
  double sm = s1, cm = c1, acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    acc += terms_[i].amplitude * (sm * cos_phase_[i] + cm * sin_phase_[i]);
    const double sn = sm * c1 + cm * s1;
    cm = cm * c1 - sm * s1;
    sm = sn;
  }
  return acc;
}

double SitePotential::first(double x) const noexcept {
  if (terms_.empty()) return 0.0;
  const double theta = kTwoPi * frac(x);
  const double s1 = std::sin(theta), c1 = std::cos(theta);
  double sm = s1, cm = c1, acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double m = static_cast<double>(i + 1);
    // d/dx sin(m theta + phi) = 2 pi m cos(m theta + phi)
    acc += terms_[i].amplitude * kTwoPi * m * (cm * cos_phase_[i] - sm * sin_phase_[i]);
    const double sn = sm * c1 + cm * s1;
    cm = cm * c1 - sm * s1;
    sm = sn;
  }
  return acc;
}

double SitePotential::second(double x) const noexcept {
  if (terms_.empty()) return 0.0;
  const double theta = kTwoPi * frac(x);
  const double s1 = std::sin(theta), c1 = std::cos(theta);
  double sm = s1, cm = c1, acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double k = kTwoPi * static_cast<double>(i + 1);
    acc -= terms_[i].amplitude * k * k * (sm * cos_phase_[i] + cm * sin_phase_[i]);
    const double sn = sm * c1 + cm * s1;
    cm = cm * c1 - sm * s1;
    sm = sn;
  }
  return acc;
}

double SitePotential::second_derivative_bound() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double k = kTwoPi * static_cast<double>(i + 1);
    acc += std::abs(terms_[i].amplitude) * k * k;
  }
  return acc;
}

std::string SitePotential::describe() const {
  std::string out = "V.fourier=[";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += ",";
    out += "(" + fmt17(terms_[i].amplitude) + "," + fmt17(terms_[i].phase) + ")";
  }
  return out + "]";
}

void PulseSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("pulse.tau must be > 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ArgumentError("pulse.kappa must be >= 0");
}

double pulse_value(const PulseSpec& pulse, double t) {
  if (t < 0.0) throw ArgumentError("pulse_value needs t >= 0");
  const double n = std::floor(t / pulse.tau);
  return std::fmod(n, 2.0) == 0.0 ? 0.0 : pulse.kappa;
}

void ModelSpec::validate() const { pulse.validate(); }

std::string ModelSpec::canonical() const {
  return W.describe() + ";" + V.describe() + ";pulse.tau=" + fmt17(pulse.tau) +
         ";pulse.kappa=" + fmt17(pulse.kappa);
}

ModelSpec default_model() {
  // V'(x) = 1 - F_5(x) = -2 sum_{m=1}^{4} (1 - m/5) cos(2 pi m x), so
  // V(x) = sum_m (1 - m/5)/(pi m) sin(2 pi m x + pi).
  std::vector<FourierTerm> terms;
  for (int m = 1; m <= 4; ++m) {
    terms.push_back({(1.0 - m / 5.0) / (std::numbers::pi * m), std::numbers::pi});
  }
  ModelSpec model;
  model.W = InteractionPotential::quadratic(1.0);
  model.V = SitePotential(std::move(terms));
  model.pulse = PulseSpec{10.0, 5.0};
  return model;
}

DeltaBounds delta_bounds(const InteractionPotential& W, double rho) {
  if (W.kind() == InteractionPotential::Kind::quadratic) {
    return {2.0 * W.c2(), 2.0 * W.c2()};
  }
  // W'' = 2 c2 + 12 c4 x^2 is even and increasing in |x|.
  const double lo = rho - 1.0, hi = rho + 1.0;
  const double x_min = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  const double x_max = std::max(std::abs(lo), std::abs(hi));
  return {W.second(x_min), W.second(x_max)};
}

double score_by_alpha(double alpha, double /*beta*/) { return alpha; }

std::optional<AsymmetryParams> extract_asymmetry(const SitePotential& V, double kappa,
                                                 const DeltaBounds& deltas, int grid_n,
                                                 const AsymmetryScore& score) {
  if (grid_n < 1000) throw ArgumentError("extract_asymmetry needs grid_n >= 1000");
  if (!(kappa >= 0.0)) throw ArgumentError("extract_asymmetry needs kappa >= 0");
  const auto n = static_cast<std::size_t>(grid_n);
  std::vector<double> force(n);
  double force_max = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    force[i] = kappa * V.first(static_cast<double>(i) / grid_n);
    force_max = std::max(force_max, force[i]);
  }
  // kappa V' is Lipschitz with constant kappa * bound(V''); between adjacent
  // grid points it can drop at most this much below the endpoint values.
  const double margin = kappa * V.second_derivative_bound() / (2.0 * grid_n);
  const double beta_max = force_max - margin - deltas.delta_plus;
  if (!(beta_max > 0.0)) return std::nullopt;

  constexpr int kBetaSteps = 96;
  constexpr double kBetaSpan = 1e-4;
  std::optional<AsymmetryParams> best;
  double best_score = -INFINITY;
  for (int s = 0; s < kBetaSteps; ++s) {
    const double beta = beta_max * std::pow(kBetaSpan, static_cast<double>(s) / (kBetaSteps - 1));
    const double threshold = deltas.delta_plus + beta + margin;
    // Longest circular run of passing grid points.
    std::size_t best_len = 0, best_start = 0, run = 0, run_start = 0;
    bool all_pass = true;
    for (std::size_t j = 0; j < 2 * n; ++j) {
      const std::size_t i = j % n;
      if (force[i] >= threshold) {
        if (run == 0) run_start = j;
        ++run;
        if (run > best_len && run <= n) {
          best_len = run;
          best_start = run_start;
        }
      } else {
        run = 0;
        if (j < n) all_pass = false;
      }
    }
    if (all_pass || best_len < 2) continue;
    const double length = static_cast<double>(best_len - 1) / grid_n;
    double alpha = length - 0.5;
    if (!(alpha > 0.0)) continue;
    alpha = std::min(alpha, std::nextafter(0.5, 0.0));
    const double sc = score(alpha, beta);
    if (!best || sc > best_score) {
      best_score = sc;
      const double a = static_cast<double>(best_start % n) / grid_n;
      best = AsymmetryParams{alpha, beta, a, a + length, deltas.delta_minus, deltas.delta_plus};
    }
  }
  return best;
}

}  // namespace fkr
