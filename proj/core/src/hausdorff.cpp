#include "sspack/hausdorff.hpp"

#include "sspack/errors.hpp"
#include "sspack/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace sspack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Cell>
struct Queued {
  Cell cell;
  double lb;
  std::uint64_t seq;
};

template <class Cell>
struct SmallerBoundFirst {
  bool operator()(const Queued<Cell>& x, const Queued<Cell>& y) const {
    if (x.lb != y.lb) return x.lb > y.lb;
    return x.seq > y.seq;
  }
};

struct CellValue {
  double lb;       // +inf marks a cell with no admissible interval
  double witness;  // objective upper bound at the cell's candidate, +inf if none
  double a;
  double b;
};

// Generic best-first minimisation loop shared by the interval and ball searches.
// Returns {lo, hi, cells, converged}.
struct MinimizeOutcome {
  double lo;
  double hi;
  std::size_t cells;
  bool converged;
  std::vector<BracketSnapshot> history;
};

template <class Cell, class Eval, class Split, class OnWitness>
MinimizeOutcome minimize(Cell root, double initial_hi, const OptimizerOptions& options, Eval&& eval, Split&& split,
                         OnWitness&& on_witness) {
  double best_hi = initial_hi;
  std::uint64_t seq = 0;
  std::priority_queue<Queued<Cell>, std::vector<Queued<Cell>>, SmallerBoundFirst<Cell>> heap;

  auto absorb = [&](Cell&& cell, double parent_lb, const CellValue& v) {
    if (v.witness < best_hi) {
      best_hi = v.witness;
      on_witness(cell, v);
    }
    if (v.lb == kInf) return;
    const double lb = std::max(parent_lb, v.lb);
    heap.push({std::move(cell), lb, seq++});
  };

  const CellValue root_value = eval(root);
  absorb(std::move(root), 0.0, root_value);
  std::size_t cells = 1;
  double reported_lo = 0.0;
  MinimizeOutcome out{0.0, best_hi, 0, false, {}};

  std::vector<Queued<Cell>> parents;
  std::vector<Cell> children;
  std::vector<double> child_parent_lb;
  std::vector<CellValue> values;
  while (true) {
    while (!heap.empty() && heap.top().lb >= best_hi) heap.pop();
    const double lo = heap.empty() ? best_hi : std::min(heap.top().lb, best_hi);
    reported_lo = std::max(reported_lo, lo);
    if (options.record_history) out.history.push_back({cells, reported_lo, best_hi});
    if (best_hi - reported_lo <= options.eps) {
      out.converged = true;
      break;
    }
    if (cells >= options.max_cells || heap.empty()) break;

    parents.clear();
    while (!heap.empty() && parents.size() < options.batch) {
      if (heap.top().lb < best_hi) parents.push_back(heap.top());
      heap.pop();
    }
    children.clear();
    child_parent_lb.clear();
    for (const auto& p : parents) {
      split(p.cell, children);
      child_parent_lb.resize(children.size(), p.lb);
    }
    values.assign(children.size(), CellValue{});
    parallel_for(children.size(), options.threads, [&](std::size_t i) { values[i] = eval(children[i]); });
    for (std::size_t i = 0; i < children.size(); ++i) absorb(std::move(children[i]), child_parent_lb[i], values[i]);
    cells += children.size();
  }
  out.lo = std::min(reported_lo, best_hi);
  out.hi = best_hi;
  out.cells = cells;
  return out;
}

double objective_tolerance(double eps, double delta, double s, double initial_hi, double max_diameter) {
  const double floor = std::pow(delta, s) / initial_hi;
  return std::max(1e-15, eps / 10.0 * floor * floor / std::max(1.0, std::pow(max_diameter, s)));
}

void throw_if_strict(const OptimizerOptions& options, const MinimizeOutcome& out, const char* what) {
  if (out.converged || !options.strict) return;
  std::ostringstream os;
  os << what << " stopped after " << out.cells << " cells with gap " << (out.hi - out.lo) << " > eps " << options.eps;
  throw PrecisionError(os.str(), out.lo, out.hi);
}

}  // namespace

ObjectiveBound interval_objective(const CylinderTree& tree, double delta, double a, double b, double tol) {
  MeasureOptions mo;
  mo.tol = tol;
  const MeasureBound m = interval_measure(tree, a, b, mo);
  const double num = std::pow(std::max(b - a, delta), tree.s());
  ObjectiveBound out{0.0, kInf};
  if (m.hi > 0.0) out.lo = inflate_down(inflate_down(num) / m.hi);
  if (m.lo > 0.0) out.hi = inflate_up(inflate_up(num) / m.lo);
  return out;
}

DensityResult hausdorff_measure_1d(const Ifs& ifs, double s, const SeparationCert& cert,
                                   const OptimizerOptions& options) {
  if (ifs.dim() != 1) throw ParameterError("interval search needs a one-dimensional IFS");
  if (!(options.eps > 0.0)) throw ParameterError("eps must be positive");
  const CylinderTree tree(ifs, s);
  const double delta = cert.delta_lb;
  const Ball b0 = tree.root_ball();
  const double h_lo = inflate_down(b0.center(0) - b0.radius);
  const double h_hi = inflate_up(b0.center(0) + b0.radius);

  // The hull of K is a valid candidate, with lambda = 1.
  const ObjectiveBound hull = interval_objective(tree, delta, h_lo, h_hi);
  const double initial_hi = hull.hi;

  MeasureOptions mo;
  mo.depth_cap = options.measure_depth_cap;
  mo.tol = objective_tolerance(options.eps, delta, s, initial_hi, h_hi - h_lo);

  auto eval = [&](const IntervalCell& c) {
    CellValue v{kInf, kInf, 0.0, 0.0};
    const double ru = tree.safe_radius(c.left_node);
    const double rv = tree.safe_radius(c.right_node);
    const double cu = c.left_node.center(0);
    const double cv = c.right_node.center(0);
    const double outer_a = cu - ru;
    const double outer_b = cv + rv;
    if (!(outer_b > outer_a)) return v;

    // Any I in the cell is contained in [outer_a, outer_b] and has diameter at
    // least the inner span, clamped below at delta.
    const double span = std::max(delta, (cv - rv) - (cu + ru));
    const MeasureBound m = interval_measure(tree, outer_a, outer_b, mo);
    if (m.hi <= 0.0) return v;
    v.lb = inflate_down(inflate_down(std::pow(span, s)) / m.hi);

    if (cv > cu) {
      const MeasureBound w = interval_measure(tree, cu, cv, mo);
      if (w.lo > 0.0) {
        v.witness = inflate_up(inflate_up(std::pow(std::max(inflate_up(cv - cu), delta), s)) / w.lo);
        v.a = cu;
        v.b = cv;
      }
    }
    return v;
  };

  auto split = [&](const IntervalCell& c, std::vector<IntervalCell>& out) {
    const bool left = c.left_node.radius >= c.right_node.radius;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
      const auto letter = static_cast<std::uint8_t>(i);
      if (left) {
        out.push_back({c.left.extended(letter), c.right, tree.child(c.left_node, i), c.right_node, c.lower_bound});
      } else {
        out.push_back({c.left, c.right.extended(letter), c.left_node, tree.child(c.right_node, i), c.lower_bound});
      }
    }
  };

  double wa = h_lo;
  double wb = h_hi;
  auto on_witness = [&](const IntervalCell&, const CellValue& v) {
    wa = v.a;
    wb = v.b;
  };

  const MinimizeOutcome out =
      minimize(IntervalCell{Word{}, Word{}, tree.root(), tree.root(), 0.0}, initial_hi, options, eval, split, on_witness);
  throw_if_strict(options, out, "interval search");

  DensityResult result{};
  result.value_lo = out.lo;
  result.value_hi = out.hi;
  result.witness = Ball{scalar_vec(0.5 * (wa + wb)), 0.5 * (wb - wa)};
  result.witness_density_lo = interval_objective(tree, delta, wa, wb, mo.tol).lo;
  result.cells_explored = out.cells;
  result.eps = options.eps;
  result.converged = out.converged;
  result.lambda_floor = std::pow(delta, s) / initial_hi;
  result.window = {delta / 2.0, b0.radius};
  result.history = out.history;
  return result;
}

namespace {

struct BallCell {
  Box centers;
  double r_a;
  double r_b;
};

}  // namespace

BallUpperBound hausdorff_upper_bound_balls(const Ifs& ifs, double s, const SeparationCert& cert,
                                           const OptimizerOptions& options) {
  if (!(options.eps > 0.0)) throw ParameterError("eps must be positive");
  const CylinderTree tree(ifs, s);
  const double delta = cert.delta_lb;
  const Ball b0 = tree.root_ball();

  // Centres range over the bounding box of B0 clipped to X; radii over [delta/2, R0].
  Box region{b0.center.array() - b0.radius, b0.center.array() + b0.radius};
  region.lo = region.lo.cwiseMax(ifs.box().lo);
  region.hi = region.hi.cwiseMin(ifs.box().hi);
  const double r_hi = std::max(b0.radius, delta / 2.0) * (1.0 + 1e-9);

  const DensityBound whole = density_bounds(tree, Ball{b0.center, r_hi}, 1e-9);
  const double initial_hi = whole.hi;

  MeasureOptions mo;
  mo.depth_cap = options.measure_depth_cap;
  mo.tol = objective_tolerance(options.eps, delta, s, initial_hi, 2.0 * r_hi);

  auto eval = [&](const BallCell& c) {
    CellValue v{kInf, kInf, 0.0, 0.0};
    const Vec q = c.centers.center();
    const double half_diag = c.centers.half_extent().norm() * (1.0 + kCertifiedInflation);
    const MeasureBound outer = ball_measure(tree, Ball{q, c.r_b + half_diag}, mo);
    if (outer.hi <= 0.0) return v;
    v.lb = inflate_down(inflate_down(std::pow(2.0 * c.r_a, s)) / outer.hi);

    const double r = 0.5 * (c.r_a + c.r_b);
    const MeasureBound inner = ball_measure(tree, Ball{q, r}, mo);
    if (inner.lo > 0.0) {
      v.witness = inflate_up(inflate_up(std::pow(2.0 * r, s)) / inner.lo);
      v.a = r;
    }
    return v;
  };

  auto split = [&](const BallCell& c, std::vector<BallCell>& out) {
    Eigen::Index axis = 0;
    const double edge = (c.centers.hi - c.centers.lo).maxCoeff(&axis);
    if (c.r_b - c.r_a >= edge) {
      const double mid = 0.5 * (c.r_a + c.r_b);
      out.push_back({c.centers, c.r_a, mid});
      out.push_back({c.centers, mid, c.r_b});
      return;
    }
    const double mid = 0.5 * (c.centers.lo(axis) + c.centers.hi(axis));
    BallCell lower = c;
    BallCell upper = c;
    lower.centers.hi(axis) = mid;
    upper.centers.lo(axis) = mid;
    out.push_back(std::move(lower));
    out.push_back(std::move(upper));
  };

  Ball witness{b0.center, r_hi};
  auto on_witness = [&](const BallCell& c, const CellValue& v) { witness = Ball{c.centers.center(), v.a}; };

  const MinimizeOutcome out =
      minimize(BallCell{region, delta / 2.0, r_hi}, initial_hi, options, eval, split, on_witness);
  throw_if_strict(options, out, "ball search");
  return {out.hi, out.lo, witness, out.cells, out.converged};
}

}  // namespace sspack
