#include "sspack/packing.hpp"

#include "sspack/errors.hpp"
#include "sspack/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace sspack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Evaluation {
  double upper;
  double witness_lo;
  double witness_radius;
};

struct QueuedCell {
  SearchCell cell;
  std::uint64_t seq;
};

struct LargerBoundFirst {
  bool operator()(const QueuedCell& x, const QueuedCell& y) const {
    if (x.cell.upper_bound != y.cell.upper_bound) return x.cell.upper_bound < y.cell.upper_bound;
    return x.seq > y.seq;
  }
};

Evaluation evaluate(const CylinderTree& tree, const SearchCell& cell, const MeasureOptions& mo) {
  const double s = tree.s();
  const double rho = tree.safe_radius(cell.node);
  Evaluation out{kInf, 0.0, 0.5 * (cell.r_a + cell.r_b)};

  // Every x in the cylinder has B(x, r_a) containing B(c, r_a - rho).
  const double inner = cell.r_a - rho;
  if (inner > 0.0) {
    const MeasureBound m = ball_measure(tree, Ball{cell.node.center, inner}, mo);
    if (m.lo > 0.0) out.upper = inflate_up(inflate_up(std::pow(2.0 * cell.r_b, s)) / m.lo);
  }

  // The centre is a point of K up to slack, so lambda(B(x, r)) <= lambda_hi(B(c, r + slack)).
  const double r = out.witness_radius;
  const MeasureBound w = ball_measure(tree, Ball{cell.node.center, r + tree.slack()}, mo);
  if (w.hi > 0.0) out.witness_lo = inflate_down(inflate_down(std::pow(2.0 * r, s)) / w.hi);
  return out;
}

void split(const CylinderTree& tree, const SearchCell& cell, std::vector<SearchCell>& out) {
  const double radius_width = cell.r_b - cell.r_a;
  const double center_width = 2.0 * tree.safe_radius(cell.node);
  if (radius_width >= center_width) {
    const double mid = 0.5 * (cell.r_a + cell.r_b);
    out.push_back({cell.word, cell.node, cell.r_a, mid, cell.upper_bound});
    out.push_back({cell.word, cell.node, mid, cell.r_b, cell.upper_bound});
    return;
  }
  for (std::size_t i = 0; i < tree.ifs().size(); ++i) {
    out.push_back({cell.word.extended(static_cast<std::uint8_t>(i)), tree.child(cell.node, i), cell.r_a, cell.r_b,
                   cell.upper_bound});
  }
}

}  // namespace

double lambda_floor(const CylinderTree& tree, double radius) {
  const double r0 = tree.root_ball().radius;
  if (radius >= 2.0 * r0) return 1.0;
  const double v = std::pow(tree.ifs().min_ratio() * radius / (2.0 * r0), tree.s());
  return std::min(1.0, inflate_down(v));
}

DensityBound density_bounds(const CylinderTree& tree, const Ball& ball, double tol, int depth_cap) {
  if (!(ball.radius > 0.0)) throw ParameterError("ball radius must be positive");
  MeasureOptions mo;
  mo.tol = tol;
  mo.depth_cap = depth_cap;
  const MeasureBound m = ball_measure(tree, ball, mo);
  const double num = std::pow(2.0 * ball.radius, tree.s());
  DensityBound out{0.0, kInf, m.lo > 0.0, m};
  if (m.hi > 0.0) out.lo = inflate_down(inflate_down(num) / m.hi);
  if (m.lo > 0.0) out.hi = inflate_up(inflate_up(num) / m.lo);
  return out;
}

DensityResult maximize_reciprocal_density(const CylinderTree& tree, RadiusWindow window,
                                          const OptimizerOptions& options) {
  if (!(options.eps > 0.0)) throw ParameterError("eps must be positive");
  if (!(window.lo > 0.0) || !(window.hi > window.lo)) throw ParameterError("radius window needs 0 < lo < hi");
  if (options.batch == 0) throw ParameterError("batch size must be positive");
  const double s = tree.s();

  const double floor = lambda_floor(tree, window.lo);
  const double top_num = std::pow(2.0 * window.hi, s);
  const double a_priori = inflate_up(inflate_up(top_num) / floor);

  MeasureOptions mo;
  mo.depth_cap = options.measure_depth_cap;
  mo.tol = std::max(1e-15, options.eps / 10.0 * floor * floor / std::max(1.0, top_num));

  DensityResult result{};
  result.eps = options.eps;
  result.lambda_floor = floor;
  result.window = window;

  double best_lo = 0.0;
  Ball best_ball{tree.root_ball().center, window.hi};
  std::uint64_t seq = 0;
  std::priority_queue<QueuedCell, std::vector<QueuedCell>, LargerBoundFirst> heap;

  auto absorb = [&](SearchCell cell, const Evaluation& ev) {
    cell.upper_bound = std::min({cell.upper_bound, ev.upper, a_priori});
    if (ev.witness_lo > best_lo) {
      best_lo = ev.witness_lo;
      best_ball = Ball{cell.node.center, ev.witness_radius};
    }
    heap.push({std::move(cell), seq++});
  };

  SearchCell root{Word{}, tree.root(), window.lo, window.hi, a_priori};
  absorb(root, evaluate(tree, root, mo));
  std::size_t cells = 1;
  double reported_hi = a_priori;

  auto current_hi = [&] {
    while (!heap.empty() && heap.top().cell.upper_bound <= best_lo) heap.pop();
    const double hi = heap.empty() ? best_lo : std::max(best_lo, heap.top().cell.upper_bound);
    reported_hi = std::min(reported_hi, hi);
    return reported_hi;
  };

  std::vector<SearchCell> parents;
  std::vector<SearchCell> children;
  std::vector<Evaluation> evals;
  bool converged = false;
  while (true) {
    const double hi = current_hi();
    if (options.record_history) result.history.push_back({cells, best_lo, hi});
    if (hi - best_lo <= options.eps) {
      converged = true;
      break;
    }
    if (cells >= options.max_cells) break;

    parents.clear();
    while (!heap.empty() && parents.size() < options.batch) {
      if (heap.top().cell.upper_bound > best_lo) parents.push_back(heap.top().cell);
      heap.pop();
    }
    children.clear();
    for (const SearchCell& p : parents) split(tree, p, children);
    evals.assign(children.size(), Evaluation{});
    parallel_for(children.size(), options.threads, [&](std::size_t i) { evals[i] = evaluate(tree, children[i], mo); });
    for (std::size_t i = 0; i < children.size(); ++i) absorb(std::move(children[i]), evals[i]);
    cells += children.size();
  }

  result.value_lo = best_lo;
  result.value_hi = std::max(best_lo, reported_hi);
  result.witness = best_ball;
  result.witness_density_lo = best_lo;
  result.cells_explored = cells;
  result.converged = converged;
  if (!converged && options.strict) {
    std::ostringstream os;
    os << "packing optimizer stopped after " << cells << " cells with gap " << result.width() << " > eps "
       << options.eps;
    throw PrecisionError(os.str(), result.value_lo, result.value_hi);
  }
  return result;
}

DensityResult packing_measure(const Ifs& ifs, double s, const SeparationCert& cert, const OptimizerOptions& options) {
  const CylinderTree tree(ifs, s);
  const RadiusRange w = radius_range(cert);
  return maximize_reciprocal_density(tree, {w.lo, w.hi}, options);
}

TheoremSample check_density_ball(const CylinderTree& tree, const DensityResult& result, const Ball& ball,
                                 const MeasureOptions& measure) {
  MeasureOptions mo = measure;
  mo.tol = std::min(mo.tol, 1e-6 * lambda_floor(tree, ball.radius));
  const MeasureBound m = ball_measure(tree, ball, mo);
  TheoremSample out{ball, std::pow(2.0 * ball.radius, tree.s()), 0.0, false};
  out.rhs = result.value_hi * m.hi * (1.0 + 1e-9);
  out.violated = out.lhs > out.rhs;
  return out;
}

TheoremCheckReport check_density_theorem(const CylinderTree& tree, const SeparationCert& cert,
                                         const DensityResult& result, std::size_t n_samples, std::uint64_t seed) {
  const OpenSetPredicate open_set(tree, cert);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, static_cast<int>(tree.ifs().size()) - 1);
  std::uniform_real_distribution<double> fraction(0.02, 1.0);
  constexpr int kCenterDepth = 16;

  TheoremCheckReport report;
  report.min_slack_ratio = kInf;
  for (std::size_t k = 0; k < n_samples; ++k) {
    CylinderTree::Node node = tree.root();
    for (int j = 0; j < kCenterDepth; ++j) node = tree.child(node, static_cast<std::size_t>(letter(rng)));
    const Ball ball{node.center, fraction(rng) * cert.delta_lb / 2.0};
    if (!open_set.contains_ball(ball)) {
      ++report.skipped;
      continue;
    }
    const TheoremSample sample = check_density_ball(tree, result, ball);
    ++report.checked;
    report.min_slack_ratio = std::min(report.min_slack_ratio, sample.rhs / sample.lhs);
    if (sample.violated) report.violations.push_back(sample);
  }
  return report;
}

BlowupReport check_blowup_invariance(const CylinderTree& tree, const SeparationCert& cert, std::size_t n_cases,
                                     std::uint64_t seed, std::size_t max_attempts) {
  if (max_attempts == 0) max_attempts = 20 * n_cases;
  std::mt19937_64 rng(seed);
  const std::size_t n = tree.ifs().size();
  std::uniform_int_distribution<int> letter(0, static_cast<int>(n) - 1);
  std::uniform_real_distribution<double> fraction(0.02, 0.98);
  constexpr int kCenterDepth = 14;

  BlowupReport report;
  for (std::size_t attempt = 0; attempt < max_attempts && report.certified() < n_cases; ++attempt) {
    const auto j = static_cast<std::size_t>(letter(rng));
    CylinderTree::Node node = tree.child(tree.root(), j);
    for (int k = 1; k < kCenterDepth; ++k) node = tree.child(node, static_cast<std::size_t>(letter(rng)));
    const double r = tree.ifs().map(j).ratio() * fraction(rng) * cert.delta_lb / 2.0;
    const Ball ball{node.center, r};
    Ball pre;
    try {
      pre = blowup(tree, cert, j, ball);
    } catch (const PreconditionUnverified&) {
      ++report.skipped;
      continue;
    }
    const double tol_b = 1e-7 * lambda_floor(tree, ball.radius);
    const double tol_p = 1e-7 * lambda_floor(tree, pre.radius);
    BlowupCase c{j, ball, pre, density_bounds(tree, ball, tol_b), density_bounds(tree, pre, tol_p), false};
    c.overlap = intervals_overlap(c.original.lo, c.original.hi, c.blown_up.lo, c.blown_up.hi);
    if (c.overlap) {
      ++report.passed;
    } else {
      ++report.failed;
      report.failures.push_back(c);
    }
  }
  return report;
}

std::size_t density_scan(const CylinderTree& tree, int center_depth, std::span<const double> radii, double tol,
                         const std::function<void(const ScanRecord&)>& sink, std::size_t budget) {
  if (radii.empty()) return 0;
  if (center_depth < 0) throw ParameterError("center depth must be nonnegative");
  const double centers = std::pow(static_cast<double>(tree.ifs().size()), center_depth);
  if (centers * static_cast<double>(radii.size()) > static_cast<double>(budget)) {
    throw BudgetExceeded("density scan exceeds the evaluation budget");
  }
  const std::vector<Vec> points = attractor_sample(tree.ifs(), center_depth);
  std::size_t emitted = 0;
  for (const Vec& x : points) {
    for (double r : radii) {
      const DensityBound b = density_bounds(tree, Ball{x, r}, tol);
      sink({x, r, b.lo, b.hi});
      ++emitted;
    }
  }
  return emitted;
}

}  // namespace sspack
