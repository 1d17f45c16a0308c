#pragma once

#include "sspack/ifs.hpp"
#include "sspack/separation.hpp"

#include <cstddef>
#include <vector>

namespace sspack {

/// Certified bracket lo <= lambda(Q) <= hi for a query set Q.
struct MeasureBound {
  double lo;
  double hi;
  int depth_used;
  std::size_t leaves;
  bool converged;  // hi - lo <= requested tolerance

  double width() const { return hi - lo; }
};

struct MeasureOptions {
  double tol = 1e-7;
  int depth_cap = 60;
  std::size_t max_expansions = 4'000'000;
};

// Closed-ball query. `within` restricts to lambda(ball intersected with K_within).
MeasureBound ball_measure(const CylinderTree& tree, const Ball& ball, const MeasureOptions& options = {},
                          const Word& within = {});
MeasureBound ball_measure(const Ifs& ifs, double s, const Ball& ball, const MeasureOptions& options = {});

MeasureBound box_measure(const CylinderTree& tree, const Box& box, const MeasureOptions& options = {},
                         const Word& within = {});

// d = 1 only; closed interval [a, b].
MeasureBound interval_measure(const CylinderTree& tree, double a, double b, const MeasureOptions& options = {},
                              const Word& within = {});
MeasureBound interval_measure(const Ifs& ifs, double s, double a, double b, const MeasureOptions& options = {});

// f_j^{-1}(ball), refusing unless ball is certified inside f_j(O) and centred in K_j.
Ball blowup(const CylinderTree& tree, const SeparationCert& cert, std::size_t letter, const Ball& ball);

struct IdentityTerm {
  Word word;
  double weight;
  MeasureBound image;  // lambda(f_w(ball))
  bool matches_scaled_base;
};

struct IdentityReport {
  MeasureBound base;  // lambda(ball)
  double sum_lo;
  double sum_hi;
  bool sum_matches_base;
  bool terms_match;
  std::vector<IdentityTerm> terms;

  bool holds() const { return sum_matches_base && terms_match; }
};

// sum_{|w| = k} lambda(f_w(ball)) = lambda(ball) for balls in O centred in K.
IdentityReport cylinder_union_identity_check(const CylinderTree& tree, const SeparationCert& cert, const Ball& ball,
                                             int k, const MeasureOptions& options = {});

inline bool intervals_overlap(double lo1, double hi1, double lo2, double hi2) { return lo1 <= hi2 && lo2 <= hi1; }

}  // namespace sspack
