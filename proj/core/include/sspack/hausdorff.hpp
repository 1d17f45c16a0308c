#pragma once

#include "sspack/packing.hpp"

namespace sspack {

/// Branch-and-bound cell over interval endpoints: the left end lies in the
/// cylinder of `left`, the right end in the cylinder of `right`.
struct IntervalCell {
  Word left;
  Word right;
  CylinderTree::Node left_node;
  CylinderTree::Node right_node;
  double lower_bound;
};

// H^s(K) for d = 1: inf of max(diam I, delta)^s / lambda(I) over closed intervals I
// meeting K. The witness is reported as the ball with the same endpoints.
DensityResult hausdorff_measure_1d(const Ifs& ifs, double s, const SeparationCert& cert,
                                   const OptimizerOptions& options = {});

struct BallUpperBound {
  double upper_bound;   // certified: H^s(K) <= upper_bound
  double family_lower;  // lower bound for the infimum over the ball family only
  Ball witness;
  std::size_t cells_explored;
  bool converged;

  static constexpr const char* kLabel = "UPPER BOUND ONLY";
};

// Infimum of (2r)^s / lambda(B(x, r)) over balls with 2r >= delta meeting K. Any d.
BallUpperBound hausdorff_upper_bound_balls(const Ifs& ifs, double s, const SeparationCert& cert,
                                           const OptimizerOptions& options = {});

struct ObjectiveBound {
  double lo;
  double hi;
};

// Bracket of max(b - a, delta)^s / lambda([a, b]); hi is +inf when lambda_lo = 0.
ObjectiveBound interval_objective(const CylinderTree& tree, double delta, double a, double b, double tol = 1e-9);

}  // namespace sspack
