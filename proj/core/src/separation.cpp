#include "sspack/separation.hpp"

#include "sspack/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>

namespace sspack {

namespace {

using Node = CylinderTree::Node;

struct PairItem {
  double lb;
  std::uint64_t seq;
  Node a;
  Node b;
};

struct PairOrder {
  bool operator()(const PairItem& x, const PairItem& y) const {
    if (x.lb != y.lb) return x.lb > y.lb;
    return x.seq > y.seq;
  }
};

struct NodeItem {
  double lb;
  std::uint64_t seq;
  Node node;
};

struct NodeOrder {
  bool operator()(const NodeItem& x, const NodeItem& y) const {
    if (x.lb != y.lb) return x.lb > y.lb;
    return x.seq > y.seq;
  }
};

}  // namespace

SeparationCert certify_ssc(const Ifs& ifs, double s, const SeparationOptions& options,
                           std::vector<RefinementSnapshot>* trace) {
  const double gap_tol = options.gap_tol > 0.0 ? options.gap_tol : 1e-9 * ifs.box().diameter();
  if (options.depth_cap < 1) throw ParameterError("depth cap must be positive");
  const CylinderTree tree(ifs, s);
  const double slack = tree.slack();

  std::priority_queue<PairItem, std::vector<PairItem>, PairOrder> heap;
  std::uint64_t seq = 0;
  double upper = std::numeric_limits<double>::infinity();
  int depth_used = 1;

  // Hull centres are points of K up to rounding, so their distance bounds the
  // minimal gap from above.
  auto push = [&](const Node& a, const Node& b, double parent_lb) {
    const double dist = (a.center - b.center).norm();
    upper = std::min(upper, dist + 2.0 * slack);
    const double lb = std::max(parent_lb, dist - tree.safe_radius(a) - tree.safe_radius(b));
    depth_used = std::max({depth_used, a.depth, b.depth});
    if (lb < upper) heap.push({lb, seq++, a, b});
  };

  const Node root = tree.root();
  std::vector<Node> first;
  for (std::size_t i = 0; i < ifs.size(); ++i) first.push_back(tree.child(root, i));
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t j = i + 1; j < first.size(); ++j) push(first[i], first[j], -std::numeric_limits<double>::infinity());
  }

  double lower = -std::numeric_limits<double>::infinity();
  std::size_t expanded = 0;
  while (true) {
    if (heap.empty()) {
      // Every pair was pruned against the realised upper bound.
      lower = upper;
      break;
    }
    const PairItem top = heap.top();
    lower = std::min(top.lb, upper);
    if (trace) trace->push_back({lower, upper});
    if (upper - lower <= gap_tol) break;

    heap.pop();
    const bool a_open = top.a.depth < options.depth_cap;
    const bool b_open = top.b.depth < options.depth_cap;
    if (!a_open && !b_open) {
      if (lower <= 0.0) {
        throw SscUncertified("cylinders may touch or overlap: lower bound not positive at depth cap", lower, upper);
      }
      std::ostringstream os;
      os << "separation gap not resolved to " << gap_tol << " within depth cap " << options.depth_cap;
      throw PrecisionError(os.str(), lower, upper);
    }
    if (++expanded > options.max_pairs) {
      if (lower <= 0.0) throw SscUncertified("pair budget exhausted with nonpositive lower bound", lower, upper);
      throw PrecisionError("pair budget exhausted before reaching gap tolerance", lower, upper);
    }

    const bool split_a = a_open && (!b_open || top.a.radius >= top.b.radius);
    const bool split_b = b_open && (!a_open || top.b.radius >= top.a.radius);
    if (split_a && split_b) {
      for (std::size_t i = 0; i < ifs.size(); ++i) {
        const Node ca = tree.child(top.a, i);
        for (std::size_t j = 0; j < ifs.size(); ++j) push(ca, tree.child(top.b, j), top.lb);
      }
    } else if (split_a) {
      for (std::size_t i = 0; i < ifs.size(); ++i) push(tree.child(top.a, i), top.b, top.lb);
    } else {
      for (std::size_t j = 0; j < ifs.size(); ++j) push(top.a, tree.child(top.b, j), top.lb);
    }
  }

  if (!(lower > 0.0)) {
    throw SscUncertified("cylinders may touch or overlap: lower bound not positive", lower, upper);
  }
  return cert_for_delta(ifs, (1.0 - kDeltaShrink) * lower, upper, depth_used);
}

SeparationCert cert_for_delta(const Ifs& ifs, double delta, double delta_raw, int depth_used) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  const double r_star = ifs.min_ratio();
  return {delta, delta_raw, r_star, depth_used, r_star * delta / 2.0, delta / 2.0};
}

RadiusRange radius_range(const SeparationCert& cert) { return {cert.r_star * cert.delta_lb / 2.0, cert.delta_lb / 2.0}; }

namespace {

// Shared distance branch and bound; `decided(lo, hi)` allows early exit.
template <class Decided>
DistanceBound distance_search(const CylinderTree& tree, const Vec& y, double tol, int depth_cap, const Word& start,
                              Decided decided) {
  const double slack = tree.slack();
  std::priority_queue<NodeItem, std::vector<NodeItem>, NodeOrder> heap;
  std::uint64_t seq = 0;
  double upper = std::numeric_limits<double>::infinity();
  double frozen = std::numeric_limits<double>::infinity();
  int depth_used = 0;

  auto push = [&](const Node& n, double parent_lb) {
    const double dist = (y - n.center).norm();
    upper = std::min(upper, dist + slack);
    const double lb = std::max({parent_lb, dist - tree.safe_radius(n), 0.0});
    depth_used = std::max(depth_used, n.depth);
    if (lb <= upper) heap.push({lb, seq++, n});
  };

  push(tree.node(start), 0.0);
  double lower = 0.0;
  std::size_t expanded = 0;
  while (true) {
    lower = heap.empty() ? std::min(frozen, upper) : std::min({heap.top().lb, frozen, upper});
    if (upper - lower <= tol || decided(lower, upper) || heap.empty()) break;
    if (++expanded > 2'000'000) break;
    const NodeItem top = heap.top();
    heap.pop();
    if (top.node.depth - static_cast<int>(start.size()) >= depth_cap) {
      frozen = std::min(frozen, top.lb);
      continue;
    }
    for (std::size_t i = 0; i < tree.ifs().size(); ++i) push(tree.child(top.node, i), top.lb);
  }
  return {lower, upper, depth_used};
}

}  // namespace

DistanceBound distance_to_attractor(const CylinderTree& tree, const Vec& y, double tol, int depth_cap,
                                    const Word& start) {
  if (!(tol > 0.0)) throw ParameterError("distance tolerance must be positive");
  return distance_search(tree, y, tol, depth_cap, start, [](double, double) { return false; });
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::inside: return "INSIDE";
    case Membership::outside: return "OUTSIDE";
    case Membership::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

OpenSetPredicate::OpenSetPredicate(const CylinderTree& tree, const SeparationCert& cert, int depth_cap)
    : tree_(&tree), half_gap_(cert.delta_lb / 2.0), margin_(1e-12 * tree.scale()), depth_cap_(depth_cap) {}

Membership OpenSetPredicate::classify(const Vec& y) const {
  const double inside_at = half_gap_ - margin_;
  const double outside_at = half_gap_ + margin_;
  const auto b = distance_search(*tree_, y, 0.25 * margin_, depth_cap_, Word{},
                                 [&](double lo, double hi) { return hi < inside_at || lo > outside_at; });
  if (b.hi < inside_at) return Membership::inside;
  if (b.lo > outside_at) return Membership::outside;
  return Membership::unknown;
}

bool OpenSetPredicate::contains_ball(const Ball& ball) const {
  const double target = half_gap_ - margin_ - ball.radius;
  if (target <= 0.0) return false;
  const auto b = distance_search(*tree_, ball.center, 0.25 * margin_, depth_cap_, Word{},
                                 [&](double lo, double hi) { return hi < target || lo >= target; });
  return b.hi < target;
}

Membership sosc_open_set(const CylinderTree& tree, const SeparationCert& cert, const Vec& y) {
  return OpenSetPredicate(tree, cert).classify(y);
}

}  // namespace sspack
