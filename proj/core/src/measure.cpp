#include "sspack/measure.hpp"

#include "sspack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>

namespace sspack {

namespace {

using Node = CylinderTree::Node;

enum class Relation { inside, disjoint, straddle };

struct BallQuery {
  const Ball& ball;
  double slack;

  Relation classify(const Vec& c, double rho) const {
    const double dist = (c - ball.center).norm();
    if (dist + rho + slack <= ball.radius) return Relation::inside;
    if (dist - rho - slack > ball.radius) return Relation::disjoint;
    return Relation::straddle;
  }
};

struct BoxQuery {
  const Box& box;
  double slack;

  Relation classify(const Vec& c, double rho) const {
    bool inside = true;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      if (c(k) + rho + slack < box.lo(k) || c(k) - rho - slack > box.hi(k)) return Relation::disjoint;
      if (c(k) - rho - slack < box.lo(k) || c(k) + rho + slack > box.hi(k)) inside = false;
    }
    return inside ? Relation::inside : Relation::straddle;
  }
};

struct Straddler {
  double weight;
  std::uint64_t seq;
  Node node;
};

struct HeavierFirst {
  bool operator()(const Straddler& x, const Straddler& y) const {
    if (x.weight != y.weight) return x.weight < y.weight;
    return x.seq > y.seq;
  }
};

// Refines straddling cylinders heaviest first until their total weight is
// below tol. Inside cylinders count towards lo and hi, straddlers only hi.
template <class Query>
MeasureBound measure_query(const CylinderTree& tree, const Query& query, const MeasureOptions& options,
                           const Word& within) {
  if (!(options.tol > 0.0)) throw ParameterError("measure tolerance must be positive");
  const Node start = tree.node(within);
  const std::size_t n_maps = tree.ifs().size();

  CompensatedSum lo;
  CompensatedSum frozen;
  double pending = 0.0;
  std::size_t leaves = 0;
  int depth_used = start.depth;
  std::uint64_t seq = 0;
  std::priority_queue<Straddler, std::vector<Straddler>, HeavierFirst> heap;

  auto visit = [&](Node&& n) {
    depth_used = std::max(depth_used, n.depth);
    switch (query.classify(n.center, tree.safe_radius(n))) {
      case Relation::inside:
        lo.add(n.weight);
        ++leaves;
        break;
      case Relation::disjoint:
        ++leaves;
        break;
      case Relation::straddle:
        pending += n.weight;
        heap.push({n.weight, seq++, std::move(n)});
        break;
    }
  };

  visit(Node(start));
  const int depth_limit = start.depth + options.depth_cap;
  std::size_t expansions = 0;
  while (!heap.empty() && pending + frozen.value() > options.tol && expansions < options.max_expansions) {
    Straddler top = heap.top();
    heap.pop();
    pending -= top.weight;
    if (top.node.depth >= depth_limit || top.node.radius <= tree.slack()) {
      frozen.add(top.weight);
      ++leaves;
      continue;
    }
    ++expansions;
    for (std::size_t i = 0; i < n_maps; ++i) visit(tree.child(top.node, i));
  }

  CompensatedSum hi = frozen;
  hi.add(lo.value());
  while (!heap.empty()) {
    hi.add(heap.top().weight);
    heap.pop();
    ++leaves;
  }
  const double cap = start.weight;
  const double lo_v = std::max(0.0, inflate_down(lo.value()));
  const double hi_v = std::min(cap, inflate_up(hi.value()));
  return {lo_v, std::max(lo_v, hi_v), depth_used, leaves, hi.value() - lo.value() <= options.tol};
}

double query_slack(const CylinderTree& tree, const Vec& center, double extent) {
  return tree.slack() + kGeometricSlack * (center.cwiseAbs().maxCoeff() + extent);
}

}  // namespace

MeasureBound ball_measure(const CylinderTree& tree, const Ball& ball, const MeasureOptions& options,
                          const Word& within) {
  if (ball.dim() != tree.ifs().dim()) throw ParameterError("ball dimension does not match the IFS");
  if (!(ball.radius > 0.0)) throw ParameterError("ball radius must be positive");
  return measure_query(tree, BallQuery{ball, query_slack(tree, ball.center, ball.radius)}, options, within);
}

MeasureBound ball_measure(const Ifs& ifs, double s, const Ball& ball, const MeasureOptions& options) {
  return ball_measure(CylinderTree(ifs, s), ball, options);
}

MeasureBound box_measure(const CylinderTree& tree, const Box& box, const MeasureOptions& options, const Word& within) {
  if (box.dim() != tree.ifs().dim()) throw ParameterError("box dimension does not match the IFS");
  const double extent = (box.hi - box.lo).cwiseAbs().maxCoeff();
  return measure_query(tree, BoxQuery{box, query_slack(tree, box.center(), extent)}, options, within);
}

MeasureBound interval_measure(const CylinderTree& tree, double a, double b, const MeasureOptions& options,
                              const Word& within) {
  if (tree.ifs().dim() != 1) throw ParameterError("interval queries need a one-dimensional IFS");
  if (!(a < b)) throw ParameterError("interval needs a < b");
  return box_measure(tree, Box{scalar_vec(a), scalar_vec(b)}, options, within);
}

MeasureBound interval_measure(const Ifs& ifs, double s, double a, double b, const MeasureOptions& options) {
  return interval_measure(CylinderTree(ifs, s), a, b, options);
}

Ball blowup(const CylinderTree& tree, const SeparationCert& cert, std::size_t letter, const Ball& ball) {
  const Ifs& ifs = tree.ifs();
  if (letter >= ifs.size()) throw InvalidWord("blow-up letter out of range");
  const Similitude& f = ifs.map(letter);
  const Ball pre{f.apply_inverse(ball.center), ball.radius / f.ratio()};

  const OpenSetPredicate open_set(tree, cert);
  if (!open_set.contains_ball(pre)) {
    throw PreconditionUnverified("ball not certified inside f_j(O); blow-up does not apply");
  }
  const DistanceBound centred = distance_to_attractor(tree, ball.center, open_set.margin(), 60,
                                                      Word(std::vector<std::uint8_t>{static_cast<std::uint8_t>(letter)}));
  if (centred.hi > 1e-9 * tree.scale()) {
    throw PreconditionUnverified("ball centre not certified to lie in K_j");
  }
  return pre;
}

IdentityReport cylinder_union_identity_check(const CylinderTree& tree, const SeparationCert& cert, const Ball& ball,
                                             int k, const MeasureOptions& options) {
  if (k < 1) throw ParameterError("level k must be positive");
  const OpenSetPredicate open_set(tree, cert);
  if (!open_set.contains_ball(ball)) throw PreconditionUnverified("ball not certified inside O");

  IdentityReport report{ball_measure(tree, ball, options), 0.0, 0.0, false, true, {}};
  const std::size_t n = tree.ifs().size();
  const double count = std::pow(static_cast<double>(n), k);
  if (count > 1e5) throw BudgetExceeded("identity check level too deep");

  CompensatedSum lo;
  CompensatedSum hi;
  std::vector<std::uint8_t> letters(static_cast<std::size_t>(k), 0);
  while (true) {
    const Word w(letters);
    const CylinderTree::Node node = tree.node(w);
    const Ball image = node.map.image(ball);
    MeasureBound m = ball_measure(tree, image, options);
    lo.add(m.lo);
    hi.add(m.hi);
    const bool ok = intervals_overlap(m.lo, m.hi, inflate_down(node.weight * report.base.lo),
                                      inflate_up(node.weight * report.base.hi));
    report.terms_match = report.terms_match && ok;
    report.terms.push_back({w, node.weight, m, ok});

    // Lexicographic increment.
    int pos = k - 1;
    while (pos >= 0 && letters[static_cast<std::size_t>(pos)] + 1u == n) letters[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++letters[static_cast<std::size_t>(pos)];
  }
  report.sum_lo = inflate_down(lo.value());
  report.sum_hi = inflate_up(hi.value());
  report.sum_matches_base = intervals_overlap(report.sum_lo, report.sum_hi, report.base.lo, report.base.hi);
  return report;
}

}  // namespace sspack
