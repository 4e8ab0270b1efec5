#include "fkratchet/measure.hpp"

#include <algorithm>
#include <cmath>

#include "fkratchet/errors.hpp"

namespace fkr {

namespace {

constexpr double kMergeTol = 1e-12;
constexpr double kNormTol = 1e-12;

template <class F>
double cell_average(const ChainState& s, F&& f) {
  const std::int64_t q = s.q();
  double acc = 0.0;
  for (std::int64_t k = 0; k < q; ++k) acc += f(k);
  return acc / static_cast<double>(q);
}

// Piecewise-constant function on [0, 1): value on each run plus its length.
struct Piece {
  double value;
  double length;
};

// Lebesgue median of a piecewise-constant function.
double weighted_median(std::vector<Piece> pieces) {
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.value < b.value; });
  double total = 0.0;
  for (const auto& p : pieces) total += p.length;
  double acc = 0.0;
  for (const auto& p : pieces) {
    acc += p.length;
    if (acc >= 0.5 * total) return p.value;
  }
  return pieces.empty() ? 0.0 : pieces.back().value;
}

// int_lo^hi |x - a| dx
double abs_integral(double lo, double hi, double a) {
  if (a <= lo) return 0.5 * ((hi - a) * (hi - a) - (lo - a) * (lo - a));
  if (a >= hi) return 0.5 * ((a - lo) * (a - lo) - (a - hi) * (a - hi));
  return 0.5 * ((a - lo) * (a - lo) + (hi - a) * (hi - a));
}

}  // namespace

CircleMeasure::CircleMeasure(std::vector<CircleAtom> atoms) : atoms_(std::move(atoms)) {
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.position >= 0.0 && a.position < 1.0)) {
      throw ArgumentError("circle atom position must lie in [0, 1)");
    }
    if (!(a.weight >= 0.0)) throw ArgumentError("circle atom weight must be >= 0");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kNormTol) {
    throw ArgumentError("circle measure weights must sum to 1");
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const CircleAtom& a, const CircleAtom& b) { return a.position < b.position; });
}

CircleMeasure CircleMeasure::equally_spaced(int q, double offset) {
  if (q < 1) throw ArgumentError("equally_spaced needs q >= 1");
  std::vector<CircleAtom> atoms;
  for (int k = 0; k < q; ++k) {
    double x = offset + static_cast<double>(k) / q;
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0;
    atoms.push_back({x, 1.0 / q});
  }
  return CircleMeasure(std::move(atoms));
}

double avg_width(const EmpiricalMeasure& mu) {
  const ChainState& s = mu.base;
  const double rho = s.rho();
  return cell_average(s, [&](std::int64_t k) {
    const double d = s.at(k + 1) - s.at(k) - rho;
    return d * d;
  });
}

double energy(const EmpiricalMeasure& mu, const InteractionPotential& W) {
  const ChainState& s = mu.base;
  return cell_average(s, [&](std::int64_t k) { return W.value(s.at(k + 1) - s.at(k)); });
}

double v_q_statistic(const ChainState& state) {
  return std::sqrt(avg_width(EmpiricalMeasure(state)));
}

double second_difference_msq(const EmpiricalMeasure& mu) {
  const ChainState& s = mu.base;
  return cell_average(s, [&](std::int64_t k) {
    const double d = s.at(k + 1) - 2.0 * s.at(k) + s.at(k - 1);
    return d * d;
  });
}

double force_difference_msq(const EmpiricalMeasure& mu, const InteractionPotential& W) {
  const ChainState& s = mu.base;
  return cell_average(s, [&](std::int64_t k) {
    const double d = W.first(s.at(k + 1) - s.at(k)) - W.first(s.at(k) - s.at(k - 1));
    return d * d;
  });
}

CircleMeasure project_circle(const EmpiricalMeasure& mu) {
  const auto& u = mu.base.positions();
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double f = u[i] - std::floor(u[i]);
    if (f >= 1.0 - kMergeTol) f = 0.0;
    x[i] = f;
  }
  std::sort(x.begin(), x.end());
  const double w = 1.0 / static_cast<double>(u.size());
  std::vector<CircleAtom> atoms;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++count;
    if (i + 1 == x.size() || x[i + 1] - x[i] > kMergeTol) {
      atoms.push_back({x[i + 1 - count], static_cast<double>(count) * w});
      count = 0;
    }
  }
  // Weights are count/q; renormalise the rounding of their sum.
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  for (auto& a : atoms) a.weight /= total;
  return CircleMeasure(std::move(atoms));
}

double w1_circle(const CircleMeasure& mu, const CircleMeasure& nu) {
  // D(x) = F_mu(x) - F_nu(x) on [0, 1), F(x) = measure of [0, x].
  std::vector<double> cuts{0.0};
  for (const auto& a : mu.atoms()) cuts.push_back(a.position);
  for (const auto& a : nu.atoms()) cuts.push_back(a.position);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Piece> pieces;
  std::size_t im = 0, in = 0;
  double fm = 0.0, fn = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double x = cuts[i];
    while (im < mu.atoms().size() && mu.atoms()[im].position <= x) fm += mu.atoms()[im++].weight;
    while (in < nu.atoms().size() && nu.atoms()[in].position <= x) fn += nu.atoms()[in++].weight;
    pieces.push_back({fm - fn, cuts[i + 1] - x});
  }
  const double c = weighted_median(pieces);
  double cost = 0.0;
  for (const auto& p : pieces) cost += p.length * std::abs(p.value - c);
  return cost;
}

double w1_to_lebesgue(const CircleMeasure& mu) {
  // On [x_i, x_{i+1}) the difference is D(x) = F_i - x.
  struct Segment {
    double lo, hi, level;
  };
  std::vector<Segment> segs;
  double f = 0.0, start = 0.0;
  for (const auto& a : mu.atoms()) {
    if (a.position > start) segs.push_back({start, a.position, f});
    f += a.weight;
    start = a.position;
  }
  if (start < 1.0) segs.push_back({start, 1.0, f});

  // Lebesgue measure of {D <= c}; nondecreasing and piecewise linear in c.
  auto below = [&](double c) {
    double m = 0.0;
    for (const auto& s : segs) {
      const double from = std::max(s.lo, s.level - c);
      m += std::clamp(s.hi - from, 0.0, s.hi - s.lo);
    }
    return m;
  };
  std::vector<double> knots;
  for (const auto& s : segs) {
    knots.push_back(s.level - s.hi);
    knots.push_back(s.level - s.lo);
  }
  std::sort(knots.begin(), knots.end());
  double c = knots.front();
  double g_prev = below(knots.front());
  if (g_prev < 0.5) {
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const double g = below(knots[i]);
      if (g >= 0.5) {
        const double span = g - g_prev;
        c = span > 0.0 ? knots[i - 1] + (0.5 - g_prev) / span * (knots[i] - knots[i - 1])
                       : knots[i];
        break;
      }
      g_prev = g;
    }
  }
  double cost = 0.0;
  for (const auto& s : segs) cost += abs_integral(s.lo, s.hi, s.level - c);
  return cost;
}

double mean_displacement(const EmpiricalMeasure& before, const EmpiricalMeasure& after) {
  if (!(before.base.winding() == after.base.winding())) {
    throw ArgumentError("mean_displacement needs cells with the same winding");
  }
  const auto& a = before.base.positions();
  const auto& b = after.base.positions();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += b[i] - a[i];
  return acc / static_cast<double>(a.size());
}

}  // namespace fkr
