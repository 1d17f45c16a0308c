#include <benchmark/benchmark.h>

#include "sspack/dimension.hpp"
#include "sspack/hausdorff.hpp"
#include "sspack/packing.hpp"

#include <cmath>

using namespace sspack;

namespace {

struct Cantor {
  Ifs ifs{{Similitude::line(1.0 / 3.0, 0.0), Similitude::line(1.0 / 3.0, 2.0 / 3.0)},
          Box{scalar_vec(0.0), scalar_vec(1.0)}};
  double s = similarity_dimension(ifs.ratios()).s;
  SeparationCert cert = certify_ssc(ifs, s);
};

}  // namespace

// range(0) = -log10(eps), range(1) = threads
static void PackingCantor(benchmark::State& state) {
  const Cantor c;
  OptimizerOptions o;
  o.eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  o.threads = static_cast<int>(state.range(1));
  std::size_t cells = 0;
  for (auto _ : state) {
    const DensityResult r = packing_measure(c.ifs, c.s, c.cert, o);
    cells = r.cells_explored;
    benchmark::DoNotOptimize(r);
  }
  state.counters["cells"] = static_cast<double>(cells);
}
BENCHMARK(PackingCantor)->ArgsProduct({{2, 3}, {1, 2}})->Unit(benchmark::kMillisecond);

static void HausdorffCantor(benchmark::State& state) {
  const Cantor c;
  OptimizerOptions o;
  o.eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_measure_1d(c.ifs, c.s, c.cert, o));
}
BENCHMARK(HausdorffCantor)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);
