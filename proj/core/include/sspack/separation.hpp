#pragma once

#include "sspack/ifs.hpp"

#include <cstddef>
#include <vector>

namespace sspack {

/// Certificate that the first-level cylinders are pairwise at distance more
/// than delta_lb. r_lo / r_hi is the compact radius window r_* delta/2 .. delta/2.
struct SeparationCert {
  double delta_lb;
  double delta_raw;
  double r_star;
  int depth_used;
  double r_lo;
  double r_hi;
};

// Relative shrink applied to the certified lower bound so that d(K_i, K_j) > delta_lb strictly.
inline constexpr double kDeltaShrink = 1e-9;

struct SeparationOptions {
  double gap_tol = 0.0;  // <= 0 selects 1e-9 * diam(box)
  int depth_cap = 40;
  std::size_t max_pairs = 4'000'000;
};

struct RefinementSnapshot {
  double lower;
  double upper;
};

// Branch and bound over pairs of cylinder hulls. Throws SscUncertified when the
// lower bound is not positive, PrecisionError when gap_tol cannot be reached.
SeparationCert certify_ssc(const Ifs& ifs, double s, const SeparationOptions& options = {},
                           std::vector<RefinementSnapshot>* trace = nullptr);

// Certificate for a caller-chosen admissible gap (delta_lb <= any certified lower bound).
SeparationCert cert_for_delta(const Ifs& ifs, double delta, double delta_raw, int depth_used);

struct RadiusRange {
  double lo;
  double hi;
};

RadiusRange radius_range(const SeparationCert& cert);

struct DistanceBound {
  double lo;
  double hi;
  int depth_used;
};

// Certified bracket for dist(y, K_w), with K_w the cylinder of start (K by default).
// Refinement stops once hi - lo <= tol, or early when stop_below / stop_above is decided.
DistanceBound distance_to_attractor(const CylinderTree& tree, const Vec& y, double tol, int depth_cap = 60,
                                    const Word& start = {});

enum class Membership { inside, outside, unknown };

const char* to_string(Membership m);

/// Membership predicate for O = union_{x in K} B(x, delta/2), the open set
/// used for the strong open set condition under strong separation.
class OpenSetPredicate {
 public:
  OpenSetPredicate(const CylinderTree& tree, const SeparationCert& cert, int depth_cap = 60);

  double half_gap() const { return half_gap_; }
  double margin() const { return margin_; }

  // inside if dist(y, K) < delta/2 - margin certified, outside if > delta/2 + margin.
  Membership classify(const Vec& y) const;
  // Sufficient test for ball subset of O: dist(c, K) + r < delta/2 - margin.
  bool contains_ball(const Ball& ball) const;

 private:
  const CylinderTree* tree_;
  double half_gap_;
  double margin_;
  int depth_cap_;
};

Membership sosc_open_set(const CylinderTree& tree, const SeparationCert& cert, const Vec& y);

}  // namespace sspack
