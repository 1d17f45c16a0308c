// Standalone acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "sspack/continuity.hpp"
#include "sspack/dimension.hpp"
#include "sspack/errors.hpp"
#include "sspack/hausdorff.hpp"
#include "sspack/measure.hpp"
#include "sspack/packing.hpp"
#include "sspack/separation.hpp"
#include "support/oracles.hpp"
#include "support/systems.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace sspack;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool pass, double secs, const std::string& detail) {
  std::printf("[%s] criterion %2d  %8.3fs  %s\n", pass ? "PASS" : "FAIL", id, secs, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void criterion(int id, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, pass, seconds_since(t0), detail);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double dim_of(const Ifs& f) { return similarity_dimension(f.ratios()).s; }

OptimizerOptions eps_options(double eps) {
  OptimizerOptions o;
  o.eps = eps;
  return o;
}

const double kCantorS = std::log(2.0) / std::log(3.0);
const double kCantorPacking = std::pow(4.0, kCantorS);

// Draws balls centred at depth-16 cylinder centres with radii in (0, delta/2]
// until `want` of them certify inside O.
std::size_t theorem_samples(const Ifs& ifs, const DensityResult& p, const SeparationCert& cert, std::size_t want,
                            std::uint64_t seed, std::size_t& checked) {
  const CylinderTree tree(ifs, dim_of(ifs));
  const OpenSetPredicate o(tree, cert);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, static_cast<int>(ifs.size()) - 1);
  std::uniform_real_distribution<double> frac(0.02, 1.0);
  std::size_t violations = 0;
  checked = 0;
  for (std::size_t attempt = 0; attempt < 50 * want && checked < want; ++attempt) {
    CylinderTree::Node node = tree.root();
    for (int k = 0; k < 16; ++k) node = tree.child(node, static_cast<std::size_t>(letter(rng)));
    const Ball b{node.center, frac(rng) * cert.delta_lb / 2.0};
    if (!o.contains_ball(b)) continue;
    ++checked;
    MeasureOptions mo;
    mo.tol = 1e-6 * lambda_floor(tree, b.radius);
    const MeasureBound m = ball_measure(tree, b, mo);
    if (std::pow(2.0 * b.radius, tree.s()) > p.value_hi * m.hi * (1.0 + 1e-9)) ++violations;
  }
  return violations;
}

}  // namespace

int main() {
  const Ifs cantor = fixtures::cantor();
  const Ifs gasket = fixtures::gasket(0.4);

  criterion(1, [&](std::string& d) {
    const auto t0 = std::chrono::steady_clock::now();
    const double s = dim_of(cantor);
    const double secs = seconds_since(t0);
    d = fmt("s = %.15f, |s - log2/log3| = %.2e, %.2e s", s, std::abs(s - kCantorS), secs);
    return std::abs(s - kCantorS) <= 1e-10 && secs < 0.1;
  });

  criterion(2, [&](std::string& d) {
    const SeparationCert c = certify_ssc(cantor, kCantorS);
    const SeparationCert g = certify_ssc(gasket, dim_of(gasket));
    bool touching_uncertified = false;
    try {
      certify_ssc(fixtures::touching(), 1.0);
    } catch (const SscUncertified&) {
      touching_uncertified = true;
    }
    d = fmt("cantor delta_raw = %.12f, gasket delta_lb = %.6g", c.delta_raw, g.delta_lb);
    d += touching_uncertified ? ", touching uncertified" : ", touching CERTIFIED";
    return std::abs(c.delta_raw - 1.0 / 3.0) <= 1e-6 && g.delta_lb > 0.0 && touching_uncertified;
  });

  criterion(3, [&](std::string& d) {
    const CylinderTree tree(cantor, kCantorS);
    double worst = 0.0;
    auto timed = [&](const std::function<MeasureBound()>& f) {
      const auto t0 = std::chrono::steady_clock::now();
      const MeasureBound m = f();
      worst = std::max(worst, seconds_since(t0));
      return m;
    };
    const MeasureBound half = timed([&] { return ball_measure(tree, Ball{scalar_vec(0.0), 1.0 / 3.0}); });
    const MeasureBound whole = timed([&] { return ball_measure(tree, tree.root_ball()); });
    const MeasureBound gap = timed([&] { return interval_measure(tree, 1.0 / 3.0 + 1e-9, 2.0 / 3.0 - 1e-9); });
    d = fmt("B(0,1/3) in [%.9f, %.9f], invariant ball in [%.9f, %.9f]", half.lo, half.hi, whole.lo, whole.hi);
    d += fmt(", gap in [%.2e, %.2e], slowest %.3f s", gap.lo, gap.hi, worst);
    return half.lo <= 0.5 && 0.5 <= half.hi && half.width() <= 1e-6 && whole.lo <= 1.0 && 1.0 <= whole.hi &&
           gap.lo <= 0.0 && 0.0 <= gap.hi && worst < 1.0;
  });

  criterion(4, [&](std::string& d) {
    const SeparationCert cert = certify_ssc(cantor, kCantorS);
    const oracle::TwoMap m = oracle::TwoMap::make(1.0 / 3.0, 1.0 / 3.0);
    const oracle::GridMax grid = oracle::packing_grid(m, cert.r_lo, cert.r_hi, 8, 1e-4);
    const auto t0 = std::chrono::steady_clock::now();
    const DensityResult p = packing_measure(cantor, kCantorS, cert, eps_options(1e-3));
    const double secs = seconds_since(t0);
    d = fmt("[%.6f, %.6f] width %.2e, grid oracle %.6f", p.value_lo, p.value_hi, p.width(), grid.value);
    d += fmt(", 4^s = %.6f, %.2f s", kCantorPacking, secs);
    return p.width() <= 1e-3 && p.value_lo <= grid.value && grid.value <= p.value_hi && p.value_lo <= kCantorPacking &&
           kCantorPacking <= p.value_hi && secs <= 60.0;
  });

  criterion(5, [&](std::string& d) {
    const SeparationCert cert = certify_ssc(cantor, kCantorS);
    const oracle::TwoMap m = oracle::TwoMap::make(1.0 / 3.0, 1.0 / 3.0);
    const oracle::GridMax grid = oracle::hausdorff_grid(m, cert.delta_lb, 6);
    const auto t0 = std::chrono::steady_clock::now();
    const DensityResult h = hausdorff_measure_1d(cantor, kCantorS, cert, eps_options(1e-3));
    const double secs = seconds_since(t0);
    d = fmt("[%.6f, %.6f] width %.2e, endpoint oracle %.6f", h.value_lo, h.value_hi, h.width(), grid.value);
    d += fmt(", %.2f s", secs);
    return h.width() <= 1e-3 && h.value_lo <= 1.0 && 1.0 <= h.value_hi && h.value_lo <= grid.value &&
           grid.value <= h.value_hi && secs <= 60.0;
  });

  criterion(6, [&](std::string& d) {
    bool ok = true;
    for (const Ifs* f : {&cantor, &gasket}) {
      const double s = dim_of(*f);
      const SeparationCert cert = certify_ssc(*f, s);
      OptimizerOptions o = eps_options(f == &cantor ? 1e-3 : 5e-2);
      const DensityResult p = packing_measure(*f, s, cert, o);
      std::size_t checked = 0;
      const std::size_t v = theorem_samples(*f, p, cert, 200, 2024, checked);
      d += std::string(f == &cantor ? "cantor" : "gasket") +
           fmt(": %.0f checked, %.0f violations; ", static_cast<double>(checked), static_cast<double>(v));
      ok = ok && checked == 200 && v == 0;
    }
    return ok;
  });

  criterion(7, [&](std::string& d) {
    bool ok = true;
    for (const Ifs* f : {&cantor, &gasket}) {
      const double s = dim_of(*f);
      const CylinderTree tree(*f, s);
      const BlowupReport r = check_blowup_invariance(tree, certify_ssc(*f, s), 100, 99);
      d += std::string(f == &cantor ? "cantor" : "gasket") +
           fmt(": %.0f/%.0f pass (%.0f skipped); ", static_cast<double>(r.passed), static_cast<double>(r.certified()),
               static_cast<double>(r.skipped));
      ok = ok && r.certified() == 100 && r.failed == 0;
    }
    return ok;
  });

  criterion(8, [&](std::string& d) {
    int pass = 0;
    double worst = -1e300;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Ifs f = fixtures::random_ssc_1d(seed);
      const double s = dim_of(f);
      const SeparationCert cert = certify_ssc(f, s);
      const DensityResult h = hausdorff_measure_1d(f, s, cert, eps_options(1e-3));
      const DensityResult p = packing_measure(f, s, cert, eps_options(1e-3));
      const double margin = p.value_lo + 2.0 * (h.width() + p.width()) - h.value_hi;
      worst = std::max(worst, -margin);
      pass += margin >= 0.0 ? 1 : 0;
    }
    d = fmt("%.0f/10 ordered, tightest margin %.4g", pass, -worst);
    return pass == 10;
  });

  criterion(9, [&](std::string& d) {
    const Ifs wide = fixtures::cantor(-0.5, 1.5);
    const SeparationCert cert = certify_ssc(wide, kCantorS);
    SweepOptions o;
    o.trials = 5;
    o.optimizer.eps = 5e-3;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> mags = default_magnitudes(cert.delta_lb, 8);
    const SweepResult r = continuity_sweep(wide, mags, o);
    const double secs = seconds_since(t0);
    const ModulusReport m = modulus_report(r.records, 2.0 * o.optimizer.eps);
    std::size_t certified = 0;
    for (const ModulusRow& row : m.rows) certified += row.n_certified;
    const double final_dev = m.rows.back().max_dev;
    d = "max_dev by magnitude:";
    for (const ModulusRow& row : m.rows) d += fmt(" %.3g", row.max_dev);
    d += fmt("; %.0f/40 certified, final %.3g vs %.3g, %.1f s", static_cast<double>(certified), final_dev,
             0.02 * kCantorPacking, secs);
    return m.rows.size() == 8 && m.nonincreasing && final_dev <= 0.02 * kCantorPacking && secs <= 900.0;
  });

  criterion(10, [&](std::string& d) {
    const SeparationCert cert = certify_ssc(cantor, kCantorS);
    const CylinderTree tree(cantor, kCantorS);
    const DensityResult compact = maximize_reciprocal_density(tree, {cert.r_lo, cert.r_hi}, eps_options(1e-3));
    const DensityResult wide =
        maximize_reciprocal_density(tree, {cert.r_star * cert.r_lo, cert.r_hi}, eps_options(1e-3));
    d = fmt("compact [%.6f, %.6f], wide [%.6f, %.6f]", compact.value_lo, compact.value_hi, wide.value_lo,
            wide.value_hi);
    return intervals_overlap(compact.value_lo, compact.value_hi, wide.value_lo, wide.value_hi);
  });

  criterion(11, [&](std::string& d) {
    const Ifs scaled = fixtures::scaled_cantor(2.0);
    const DensityResult a = packing_measure(cantor, kCantorS, certify_ssc(cantor, kCantorS), eps_options(1e-3));
    const double s2 = dim_of(scaled);
    const DensityResult b = packing_measure(scaled, s2, certify_ssc(scaled, s2), eps_options(1e-3));
    const double f = std::pow(2.0, kCantorS);
    const double gap = std::abs(b.value_lo + b.value_hi - f * (a.value_lo + a.value_hi)) / 2.0;
    d = fmt("scaled [%.6f, %.6f], 2^s * base [%.6f, %.6f]", b.value_lo, b.value_hi, f * a.value_lo, f * a.value_hi);
    return gap <= b.width() + f * a.width();
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
