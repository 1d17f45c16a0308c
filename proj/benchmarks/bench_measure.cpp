#include <benchmark/benchmark.h>

#include "sspack/dimension.hpp"
#include "sspack/measure.hpp"
#include "sspack/separation.hpp"

#include <cmath>

using namespace sspack;

namespace {

Ifs cantor() {
  return Ifs({Similitude::line(1.0 / 3.0, 0.0), Similitude::line(1.0 / 3.0, 2.0 / 3.0)},
             Box{scalar_vec(0.0), scalar_vec(1.0)});
}

Ifs gasket() {
  const double h = std::sqrt(3.0) / 2.0;
  return Ifs({Similitude::planar(0.4, 0.0, 0.0, 0.0), Similitude::planar(0.4, 0.0, 0.6, 0.0),
              Similitude::planar(0.4, 0.0, 0.3, 0.6 * h)},
             Box{Vec::Zero(2), Vec::Ones(2)});
}

}  // namespace

// range(0) = -log10(tol)
static void BallMeasureCantor(benchmark::State& state) {
  const Ifs f = cantor();
  const CylinderTree tree(f, similarity_dimension(f.ratios()).s);
  MeasureOptions o;
  o.tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball_measure(tree, Ball{scalar_vec(0.1), 0.2}, o));
  }
}
BENCHMARK(BallMeasureCantor)->DenseRange(4, 12, 4);

static void BallMeasureGasket(benchmark::State& state) {
  const Ifs f = gasket();
  const CylinderTree tree(f, similarity_dimension(f.ratios()).s);
  MeasureOptions o;
  o.tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball_measure(tree, Ball{make_vec({0.35, 0.3}), 0.25}, o));
  }
}
BENCHMARK(BallMeasureGasket)->DenseRange(3, 7, 2);

static void CertifySsc(benchmark::State& state) {
  const Ifs f = state.range(0) == 1 ? cantor() : gasket();
  const double s = similarity_dimension(f.ratios()).s;
  for (auto _ : state) benchmark::DoNotOptimize(certify_ssc(f, s));
}
BENCHMARK(CertifySsc)->Arg(1)->Arg(2);
