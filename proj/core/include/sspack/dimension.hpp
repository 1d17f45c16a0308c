#pragma once

#include <span>
#include <vector>

namespace sspack {

struct DimensionResult {
  double s;
  double residual;  // sum r_i^s - 1 at s
  int iterations;
};

inline constexpr double kDefaultDimensionTol = 1e-13;

// sum_i r_i^s - 1.
double moran_residual(std::span<const double> ratios, double s);

// Unique root of sum_i r_i^s = 1: bisection bracket, then safeguarded Newton.
DimensionResult similarity_dimension(std::span<const double> ratios, double tol = kDefaultDimensionTol);

// ds/dr_i at the root s (implicit differentiation of the Moran equation).
std::vector<double> dimension_gradient(std::span<const double> ratios, double s);

}  // namespace sspack
