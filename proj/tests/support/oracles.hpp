#pragma once

// Reference computations used by the tests. None of them go through the
// cylinder-tree search in the library: the measure comes from the closed-form
// recursion of the distribution function, and optima come from exhaustive grids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Two-map system x -> r1 x and x -> r2 x + (1 - r2) on [0, 1] with natural weights.
struct TwoMap {
  double r1;
  double r2;
  double s;

  static TwoMap make(double r1, double r2) {
    // Moran equation by plain bisection.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (std::pow(r1, mid) + std::pow(r2, mid) > 1.0 ? lo : hi) = mid;
    }
    return {r1, r2, 0.5 * (lo + hi)};
  }

  double w1() const { return std::pow(r1, s); }
  double w2() const { return std::pow(r2, s); }

  // lambda((-inf, x]); continuous since lambda has no atoms.
  double cdf(double x) const {
    double acc = 0.0;
    double scale = 1.0;
    for (int depth = 0; depth < 200 && scale > 1e-18; ++depth) {
      if (x <= 0.0) return acc;
      if (x >= 1.0) return acc + scale;
      if (x <= r1) {
        scale *= w1();
        x /= r1;
      } else if (x >= 1.0 - r2) {
        acc += scale * w1();
        scale *= w2();
        x = (x - (1.0 - r2)) / r2;
      } else {
        return acc + scale * w1();
      }
    }
    return acc;
  }

  double interval(double a, double b) const { return cdf(b) - cdf(a); }
  double ball(double x, double r) const { return interval(x - r, x + r); }

  // Endpoints f_w(0), f_w(1) over all |w| <= depth.
  std::vector<double> endpoints(int depth) const {
    std::vector<double> out{0.0, 1.0};
    std::vector<std::pair<double, double>> level{{0.0, 1.0}};
    for (int k = 0; k < depth; ++k) {
      std::vector<std::pair<double, double>> next;
      for (auto [a, b] : level) {
        const double len = b - a;
        next.push_back({a, a + r1 * len});
        next.push_back({b - r2 * len, b});
      }
      for (auto [a, b] : next) {
        out.push_back(a);
        out.push_back(b);
      }
      level = std::move(next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

// max over endpoint centres of (2r)^s / lambda(B(x, r)), with r on the lattice
// step * k and at every endpoint distance |x - y| inside [r_lo, r_hi].
struct GridMax {
  double value;
  double x;
  double r;
};

inline GridMax packing_grid(const TwoMap& m, double r_lo, double r_hi, int depth, double step) {
  GridMax best{0.0, 0.0, 0.0};
  const std::vector<double> xs = m.endpoints(depth);
  // Radii on the lattice step * k inside the window.
  const long k0 = static_cast<long>(std::ceil(r_lo / step - 1e-9));
  const long k1 = static_cast<long>(std::floor(r_hi / step + 1e-9));
  auto consider = [&](double x, double r) {
    const double lam = m.ball(x, r);
    if (lam <= 0.0) return;
    const double v = std::pow(2.0 * r, m.s) / lam;
    if (v > best.value) best = {v, x, r};
  };
  for (double x : xs) {
    for (long k = k0; k <= k1; ++k) consider(x, step * static_cast<double>(k));
    for (double y : xs) {
      const double r = std::abs(y - x);
      if (r >= r_lo && r <= r_hi) consider(x, r);
    }
  }
  return best;
}

// min over endpoint pairs with b - a >= delta of (b - a)^s / lambda([a, b]).
inline GridMax hausdorff_grid(const TwoMap& m, double delta, int depth) {
  GridMax best{INFINITY, 0.0, 0.0};
  const std::vector<double> xs = m.endpoints(depth);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double len = xs[j] - xs[i];
      if (len < delta) continue;
      const double lam = m.interval(xs[i], xs[j]);
      if (lam <= 0.0) continue;
      const double v = std::pow(len, m.s) / lam;
      if (v < best.value) best = {v, xs[i], xs[j]};
    }
  }
  return best;
}

// Monte Carlo estimate of lambda(B(c, r)) by sampling random infinite words
// with letter probabilities r_i^s (truncated at `depth`). Works in any
// dimension; `apply(i, x)` maps a point by the i-th similitude.
template <class Apply, class Point, class Dist>
double chaos_fraction(const std::vector<double>& probs, Apply apply, Point start, Dist in_ball,
                      std::size_t samples, int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  std::size_t hits = 0;
  std::vector<std::size_t> letters(static_cast<std::size_t>(depth));
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& l : letters) l = pick(rng);
    Point p = start;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) p = apply(*it, p);
    if (in_ball(p)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace oracle
