#include "doctest.h"

#include "sspack/dimension.hpp"
#include "sspack/errors.hpp"
#include "sspack/packing.hpp"
#include "support/oracles.hpp"
#include "support/systems.hpp"

#include <cmath>

using namespace sspack;

namespace {

const double kCantorS = std::log(2.0) / std::log(3.0);
const double kFourS = std::pow(4.0, kCantorS);

struct Setup {
  Ifs ifs;
  double s;
  CylinderTree tree;
  SeparationCert cert;

  explicit Setup(Ifs f)
      : ifs(f), s(similarity_dimension(f.ratios()).s), tree(f, s), cert(certify_ssc(f, s)) {}
};

OptimizerOptions with_eps(double eps) {
  OptimizerOptions o;
  o.eps = eps;
  return o;
}

}  // namespace

TEST_CASE("density bounds on reference balls") {
  const Setup c(fixtures::cantor());
  const DensityBound d = density_bounds(c.tree, Ball{scalar_vec(0.0), 2.0 / 27.0}, 1e-10);
  CHECK(d.bounded);
  CHECK(d.lo <= kFourS);
  CHECK(d.hi >= kFourS);
  // The boundary point 2/27 lies in K, so the geometric slack costs a little width.
  CHECK(d.hi - d.lo < 1e-6);

  const Ball b0 = c.tree.root_ball();
  const DensityBound whole = density_bounds(c.tree, b0, 1e-10);
  const double expect = std::pow(2.0 * b0.radius, c.s);
  CHECK(whole.lo <= expect * (1 + 1e-9));
  CHECK(whole.hi >= expect * (1 - 1e-9));

  // Oracle: lambda([0, 1/6]) from the distribution function.
  const oracle::TwoMap m = oracle::TwoMap::make(1.0 / 3.0, 1.0 / 3.0);
  const DensityBound sixth = density_bounds(c.tree, Ball{scalar_vec(0.0), 1.0 / 6.0}, 1e-10);
  const double ref = std::pow(1.0 / 3.0, c.s) / m.cdf(1.0 / 6.0);
  CHECK(sixth.lo <= ref * (1 + 1e-12));
  CHECK(sixth.hi >= ref * (1 - 1e-12));

  const DensityBound far = density_bounds(c.tree, Ball{scalar_vec(0.5), 0.1}, 1e-10);
  CHECK_FALSE(far.bounded);
  CHECK_THROWS_AS(density_bounds(c.tree, Ball{scalar_vec(0.0), 0.0}, 1e-9), ParameterError);
}

TEST_CASE("cantor packing measure contains 4^s at every eps") {
  const Setup c(fixtures::cantor());
  for (double eps : {1e-1, 1e-2, 1e-3, 2e-4}) {
    const DensityResult r = packing_measure(c.ifs, c.s, c.cert, with_eps(eps));
    CHECK(r.converged);
    CHECK(r.value_lo <= kFourS);
    CHECK(r.value_hi >= kFourS);
    CHECK(r.width() <= eps);
    CHECK(r.witness_density_lo <= r.value_hi);
    CHECK(r.value_lo >= std::pow(2.0 * r.witness.radius, c.s));
  }
}

TEST_CASE("grid oracle agreement") {
  struct Case {
    double r1;
    double r2;
  };
  for (Case k : {Case{1.0 / 3.0, 1.0 / 3.0}, Case{0.25, 0.25}, Case{0.2, 0.45}}) {
    const oracle::TwoMap m = oracle::TwoMap::make(k.r1, k.r2);
    const Setup f(Ifs({Similitude::line(k.r1, 0.0), Similitude::line(k.r2, 1.0 - k.r2)}, fixtures::unit_box(1)));
    const DensityResult r = packing_measure(f.ifs, f.s, f.cert, with_eps(1e-3));
    const oracle::GridMax g = oracle::packing_grid(m, f.cert.r_lo, f.cert.r_hi, 8, 1e-4);
    CHECK(g.value <= r.value_hi);
    CHECK(g.value >= r.value_lo - 1e-3);
  }
}

TEST_CASE("quarter system peaks at sqrt 6") {
  const Setup q(fixtures::quarter());
  const DensityResult r = packing_measure(q.ifs, q.s, q.cert, with_eps(1e-3));
  CHECK(r.value_lo <= std::sqrt(6.0));
  CHECK(r.value_hi >= std::sqrt(6.0));
}

TEST_CASE("loose eps returns immediately with a valid bracket") {
  const Setup c(fixtures::cantor());
  const DensityResult r = packing_measure(c.ifs, c.s, c.cert, with_eps(100.0));
  CHECK(r.cells_explored <= 2);
  CHECK(r.value_lo <= kFourS);
  CHECK(r.value_hi >= kFourS);
}

TEST_CASE("budget exhaustion raises a precision error with the bracket") {
  const Setup c(fixtures::cantor());
  OptimizerOptions o = with_eps(1e-9);
  o.max_cells = 50;
  try {
    packing_measure(c.ifs, c.s, c.cert, o);
    FAIL("expected a precision error");
  } catch (const PrecisionError& e) {
    CHECK(e.lo() <= kFourS);
    CHECK(e.hi() >= kFourS);
  }
  o.strict = false;
  const DensityResult r = packing_measure(c.ifs, c.s, c.cert, o);
  CHECK_FALSE(r.converged);
}

TEST_CASE("bracket history is monotone") {
  const Setup g(fixtures::gasket());
  OptimizerOptions o = with_eps(0.1);
  o.record_history = true;
  const DensityResult r = packing_measure(g.ifs, g.s, g.cert, o);
  REQUIRE(r.history.size() > 2);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i].hi <= r.history[i - 1].hi);
    CHECK(r.history[i].lo >= r.history[i - 1].lo);
  }
}

TEST_CASE("result does not depend on the thread count") {
  const Setup c(fixtures::random_ssc_1d(4));
  OptimizerOptions o = with_eps(1e-3);
  const DensityResult one = packing_measure(c.ifs, c.s, c.cert, o);
  o.threads = 3;
  const DensityResult three = packing_measure(c.ifs, c.s, c.cert, o);
  CHECK(one.value_lo == three.value_lo);
  CHECK(one.value_hi == three.value_hi);
  CHECK(one.cells_explored == three.cells_explored);
}

TEST_CASE("density theorem samples") {
  const Setup c(fixtures::cantor());
  const DensityResult r = packing_measure(c.ifs, c.s, c.cert, with_eps(1e-3));
  const TheoremCheckReport rep = check_density_theorem(c.tree, c.cert, r, 200, 7);
  CHECK(rep.ok());
  CHECK(rep.checked + rep.skipped == 200);
  CHECK(rep.checked > 150);

  // At the witness the inequality is tight up to the bracket width.
  const TheoremSample w = check_density_ball(c.tree, r, r.witness);
  CHECK_FALSE(w.violated);
  CHECK(w.rhs / w.lhs <= 1.0 + 2e-3);

  const TheoremSample lo = check_density_ball(c.tree, r, Ball{scalar_vec(0.0), c.cert.r_lo});
  CHECK_FALSE(lo.violated);
}

TEST_CASE("blow-up invariance on random balls and at the witness") {
  const Setup c(fixtures::cantor());
  const BlowupReport rep = check_blowup_invariance(c.tree, c.cert, 100, 17);
  CHECK(rep.ok());
  CHECK(rep.certified() == 100);

  const DensityResult r = packing_measure(c.ifs, c.s, c.cert, with_eps(1e-3));
  // The witness is too wide for f_1(O); its image under f_1 is not.
  const Ball small{scalar_vec(0.0), r.witness.radius / 3.0};
  const Ball pre = blowup(c.tree, c.cert, 0, small);
  CHECK(pre.radius == doctest::Approx(r.witness.radius));
  const DensityBound a = density_bounds(c.tree, small, 1e-10);
  const DensityBound b = density_bounds(c.tree, pre, 1e-10);
  CHECK(a.lo <= b.hi);
  CHECK(b.lo <= a.hi);
}

TEST_CASE("density scan") {
  const Setup c(fixtures::cantor());
  const DensityResult r = packing_measure(c.ifs, c.s, c.cert, with_eps(1e-3));
  std::vector<double> radii;
  for (int i = 0; i < 50; ++i) radii.push_back(c.cert.r_lo + (c.cert.r_hi - c.cert.r_lo) * i / 49.0);
  double best = 0.0;
  const std::size_t n = density_scan(c.tree, 4, radii, 1e-9, [&](const ScanRecord& rec) {
    best = std::max(best, rec.density_lo);
    CHECK(rec.density_lo <= rec.density_hi);
  });
  CHECK(n == 16 * 50);
  CHECK(best <= r.value_hi);

  std::vector<double> fine;
  for (int k = 0; k <= 1000; ++k) fine.push_back(c.cert.r_lo + (c.cert.r_hi - c.cert.r_lo) * k / 1000.0);
  fine.push_back(2.0 / 27.0);
  double best6 = 0.0;
  density_scan(c.tree, 6, fine, 1e-9, [&](const ScanRecord& rec) { best6 = std::max(best6, rec.density_lo); });
  CHECK(best6 >= 2.39);

  CHECK(density_scan(c.tree, 4, std::vector<double>{}, 1e-9, [](const ScanRecord&) {}) == 0);
  CHECK_THROWS_AS(density_scan(c.tree, 20, fine, 1e-9, [](const ScanRecord&) {}), BudgetExceeded);
}

TEST_CASE("wide window overlaps the compact one") {
  const Setup c(fixtures::cantor());
  const DensityResult compact = packing_measure(c.ifs, c.s, c.cert, with_eps(1e-3));
  const DensityResult wide =
      maximize_reciprocal_density(c.tree, {c.cert.r_star * c.cert.r_lo, c.cert.r_hi}, with_eps(1e-3));
  CHECK(wide.value_lo <= compact.value_hi);
  CHECK(compact.value_lo <= wide.value_hi);
}

TEST_CASE("scale equivariance") {
  const Setup c(fixtures::cantor());
  const Setup d(fixtures::scaled_cantor(2.0));
  const DensityResult a = packing_measure(c.ifs, c.s, c.cert, with_eps(1e-3));
  const DensityResult b = packing_measure(d.ifs, d.s, d.cert, with_eps(1e-3));
  const double f = std::pow(2.0, c.s);
  CHECK(b.value_lo <= f * a.value_hi);
  CHECK(f * a.value_lo <= b.value_hi);
}
