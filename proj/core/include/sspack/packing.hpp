#pragma once

#include "sspack/ifs.hpp"
#include "sspack/measure.hpp"
#include "sspack/separation.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sspack {

struct RadiusWindow {
  double lo;
  double hi;
};

struct BracketSnapshot {
  std::size_t cells;
  double lo;
  double hi;
};

/// Certified bracket value_lo <= P^s(K) <= value_hi (or H^s(K) for the
/// Hausdorff optimizers), with the best ball found.
struct DensityResult {
  double value_lo;
  double value_hi;
  Ball witness;
  double witness_density_lo;
  std::size_t cells_explored;
  double eps;
  bool converged;
  double lambda_floor;  // lower bound on lambda over the search window
  RadiusWindow window;
  std::vector<BracketSnapshot> history;

  double width() const { return value_hi - value_lo; }
};

/// Branch-and-bound cell: centre localised to the cylinder of `word`, radius in [r_a, r_b].
struct SearchCell {
  Word word;
  CylinderTree::Node node;
  double r_a;
  double r_b;
  double upper_bound;
};

struct OptimizerOptions {
  double eps = 1e-3;
  std::size_t max_cells = 4'000'000;
  int threads = 1;
  int measure_depth_cap = 60;
  // Cells evaluated per round. Fixed so results do not depend on `threads`.
  std::size_t batch = 16;
  bool strict = true;  // throw PrecisionError when eps is not reached
  bool record_history = false;
};

struct DensityBound {
  double lo;
  double hi;
  bool bounded;  // false when the lambda lower bound is zero
  MeasureBound measure;
};

// (2r)^s / lambda(ball), certified.
DensityBound density_bounds(const CylinderTree& tree, const Ball& ball, double tol, int depth_cap = 60);

// Lower bound on lambda(B(x, r)) for x in K: (r_* r / (2 R0))^s, capped at 1.
double lambda_floor(const CylinderTree& tree, double radius);

// Maximises (2r)^s / lambda(B(x, r)) over x in K and r in the window.
DensityResult maximize_reciprocal_density(const CylinderTree& tree, RadiusWindow window,
                                          const OptimizerOptions& options = {});

// P^s(K) as the supremum over the compact window r_* delta/2 <= r <= delta/2.
DensityResult packing_measure(const Ifs& ifs, double s, const SeparationCert& cert,
                              const OptimizerOptions& options = {});

struct TheoremSample {
  Ball ball;
  double lhs;  // (2r)^s
  double rhs;  // value_hi * lambda_hi(ball) * (1 + 1e-9)
  bool violated;
};

struct TheoremCheckReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<TheoremSample> violations;
  double min_slack_ratio = 0.0;  // min over samples of rhs / lhs

  bool ok() const { return violations.empty(); }
};

// Checks (2r)^s <= P_hi * lambda(B(x, r)) for one ball; nullopt-like skip when
// containment in O is not certified is reported via `skipped`.
TheoremSample check_density_ball(const CylinderTree& tree, const DensityResult& result, const Ball& ball,
                                 const MeasureOptions& measure = {});

// Seeded random balls centred at attractor points inside O.
TheoremCheckReport check_density_theorem(const CylinderTree& tree, const SeparationCert& cert,
                                         const DensityResult& result, std::size_t n_samples, std::uint64_t seed);

struct BlowupCase {
  std::size_t letter;
  Ball ball;
  Ball preimage;
  DensityBound original;
  DensityBound blown_up;
  bool overlap;
};

struct BlowupReport {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // containment in f_j(O) not certified
  std::vector<BlowupCase> failures;

  std::size_t certified() const { return passed + failed; }
  bool ok() const { return failed == 0; }
};

// Draws balls centred in K_j with preimage radius below delta/2 until n_cases
// certify (or max_attempts, default 20 n_cases), comparing density brackets of
// B and f_j^{-1}(B).
BlowupReport check_blowup_invariance(const CylinderTree& tree, const SeparationCert& cert, std::size_t n_cases,
                                     std::uint64_t seed, std::size_t max_attempts = 0);

struct ScanRecord {
  Vec x;
  double r;
  double density_lo;
  double density_hi;
};

// Emits one record per (attractor point at center_depth, radius); returns the count.
std::size_t density_scan(const CylinderTree& tree, int center_depth, std::span<const double> radii, double tol,
                         const std::function<void(const ScanRecord&)>& sink, std::size_t budget = 1u << 22);

}  // namespace sspack
