#include "sspack/dimension.hpp"

#include "sspack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sspack {

namespace {

void check_ratios(std::span<const double> ratios) {
  if (ratios.size() < 2) throw DomainError("need at least two ratios");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("ratio outside (0, 1): " + std::to_string(r));
  }
}

double moran_slope(std::span<const double> ratios, double s) {
  double d = 0.0;
  for (double r : ratios) d += std::pow(r, s) * std::log(r);
  return d;
}

}  // namespace

double moran_residual(std::span<const double> ratios, double s) {
  double sum = 0.0;
  for (double r : ratios) sum += std::pow(r, s);
  return sum - 1.0;
}

DimensionResult similarity_dimension(std::span<const double> ratios, double tol) {
  check_ratios(ratios);
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");

  const double rmax = *std::max_element(ratios.begin(), ratios.end());
  double lo = 0.0;
  double hi = std::log(static_cast<double>(ratios.size())) / std::log(1.0 / rmax);
  // phi(hi) <= N * rmax^hi = 1, so the root lies in [lo, hi].
  int iterations = 0;
  while (hi - lo > 1e-3 * std::max(1.0, hi) && iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    (moran_residual(ratios, mid) > 0.0 ? lo : hi) = mid;
    ++iterations;
  }

  double s = 0.5 * (lo + hi);
  double res = moran_residual(ratios, s);
  while (std::abs(res) > tol && iterations < 400) {
    (res > 0.0 ? lo : hi) = s;
    double next = s - res / moran_slope(ratios, s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
    res = moran_residual(ratios, s);
    ++iterations;
    if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) break;
  }
  return {s, res, iterations};
}

std::vector<double> dimension_gradient(std::span<const double> ratios, double s) {
  check_ratios(ratios);
  const double slope = moran_slope(ratios, s);
  std::vector<double> grad;
  grad.reserve(ratios.size());
  for (double r : ratios) grad.push_back(-s * std::pow(r, s - 1.0) / slope);
  return grad;
}

}  // namespace sspack
