#include "sspack/continuity.hpp"

#include "sspack/dimension.hpp"
#include "sspack/errors.hpp"
#include "sspack/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>

namespace sspack {

namespace {

constexpr double kRatioFloor = 1e-6;
constexpr int kPerturbRetries = 8;

struct Jitter {
  std::vector<double> ratio;
  std::vector<Vec> translation;
};

Jitter draw(const Ifs& ifs, PerturbMode mode, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Jitter j;
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    Vec t = Vec::Zero(ifs.dim());
    double r = 0.0;
    if (mode != PerturbMode::ratios) {
      for (int k = 0; k < ifs.dim(); ++k) t(k) = unit(rng);
    }
    if (mode != PerturbMode::translations) r = unit(rng);
    j.ratio.push_back(r);
    j.translation.push_back(t);
  }
  return j;
}

std::vector<Similitude> apply(const Ifs& ifs, const Jitter& j, double ratio_scale, double translation_scale) {
  std::vector<Similitude> maps;
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    const Similitude& f = ifs.map(i);
    const double r = std::clamp(f.ratio() + ratio_scale * j.ratio[i], kRatioFloor, 1.0 - kRatioFloor);
    maps.emplace_back(r, f.rotation(), Vec(f.translation() + translation_scale * j.translation[i]));
  }
  return maps;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t magnitude_index, std::size_t trial) {
  // splitmix64 finaliser over the packed indices.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (1 + (magnitude_index << 20) + trial);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

PerturbMode parse_perturb_mode(const std::string& name) {
  if (name == "translations") return PerturbMode::translations;
  if (name == "ratios") return PerturbMode::ratios;
  if (name == "both") return PerturbMode::both;
  throw ParameterError("unknown perturbation mode '" + name + "' (translations|ratios|both)");
}

const char* to_string(PerturbMode mode) {
  switch (mode) {
    case PerturbMode::translations: return "translations";
    case PerturbMode::ratios: return "ratios";
    case PerturbMode::both: return "both";
  }
  return "both";
}

Ifs perturb(const Ifs& ifs, double magnitude, PerturbMode mode, std::uint64_t seed) {
  if (!(magnitude > 0.0)) throw ParameterError("perturbation magnitude must be positive");
  std::mt19937_64 rng(seed);
  const double diam = ifs.box().diameter();
  double scale = 1.0;
  for (int attempt = 0; attempt <= kPerturbRetries; ++attempt, scale *= 0.5) {
    const Jitter j = draw(ifs, mode, rng);
    double rs = scale * magnitude / diam;
    double ts = scale * magnitude;
    try {
      // D is linear in a common jitter scale; shrink until the bound is met
      // (clamping can only reduce the ratio displacement).
      for (int k = 0; k < 4; ++k) {
        const Ifs g(apply(ifs, j, rs, ts), ifs.box());
        const double d = ifs_distance(ifs, g);
        if (d <= magnitude) return g;
        const double shrink = magnitude / d * (1.0 - 1e-12);
        rs *= shrink;
        ts *= shrink;
      }
    } catch (const DomainError&) {
      // Box invariance failed: fresh draw at half the jitter.
    }
  }
  throw DomainError("perturbation keeps leaving the ambient box after retries");
}

std::vector<double> default_magnitudes(double delta, int levels) {
  std::vector<double> out;
  for (int k = 0; k < levels; ++k) out.push_back(delta / 20.0 * std::ldexp(1.0, -k));
  return out;
}

SweepResult continuity_sweep(const Ifs& ifs, std::span<const double> magnitudes, const SweepOptions& options) {
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (!(magnitudes[i] > 0.0)) throw ParameterError("sweep magnitudes must be positive");
    if (i > 0 && !(magnitudes[i] < magnitudes[i - 1])) throw ParameterError("sweep magnitudes must be descending");
  }
  OptimizerOptions opt = options.optimizer;
  opt.strict = true;
  opt.threads = 1;

  const double s_f = similarity_dimension(ifs.ratios()).s;
  const SeparationCert full = certify_ssc(ifs, s_f);
  const double working = options.working_delta > 0.0 ? options.working_delta : 0.5 * full.delta_lb;
  if (!(working <= full.delta_lb)) throw ParameterError("working gap exceeds the certified gap of the base system");
  const SeparationCert cert = cert_for_delta(ifs, working, full.delta_raw, full.depth_used);

  SweepResult out{{s_f, cert, packing_measure(ifs, s_f, cert, opt)}, {}};
  const double base_lo = out.baseline.packing.value_lo;
  const double base_hi = out.baseline.packing.value_hi;

  const std::size_t n = magnitudes.size() * options.trials;
  out.records.resize(n);
  parallel_for(n, options.threads, [&](std::size_t idx) {
    const std::size_t mi = idx / options.trials;
    const std::size_t trial = idx % options.trials;
    SweepRecord rec{mi, trial, magnitudes[mi], 0.0, 0.0, 0.0, 0.0, false, false, 0.0,
                    trial_seed(options.seed, mi, trial)};
    std::optional<Ifs> g;
    try {
      g.emplace(perturb(ifs, magnitudes[mi], options.mode, rec.seed));
    } catch (const DomainError&) {
      out.records[idx] = rec;
      return;
    }
    rec.d_actual = ifs_distance(ifs, *g);
    rec.s_g = similarity_dimension(g->ratios()).s;
    try {
      const SeparationCert cg = certify_ssc(*g, rec.s_g);
      rec.cert_ok = cg.delta_lb > working;
    } catch (const SscUncertified&) {
      rec.cert_ok = false;
    } catch (const PrecisionError&) {
      rec.cert_ok = false;
    }
    if (rec.cert_ok) {
      try {
        const SeparationCert cw = cert_for_delta(*g, working, working, 0);
        const DensityResult p = packing_measure(*g, rec.s_g, cw, opt);
        rec.packing_lo = p.value_lo;
        rec.packing_hi = p.value_hi;
        rec.precision_ok = true;
        rec.deviation = interval_distance(base_lo, base_hi, p.value_lo, p.value_hi);
      } catch (const PrecisionError& e) {
        rec.packing_lo = e.lo();
        rec.packing_hi = e.hi();
      }
    }
    out.records[idx] = rec;
  });
  return out;
}

ModulusReport modulus_report(const std::vector<SweepRecord>& records, double slack) {
  std::map<std::size_t, ModulusRow> rows;
  std::map<std::size_t, double> sums;
  for (const SweepRecord& r : records) {
    if (!r.cert_ok || !r.precision_ok) continue;
    auto [it, fresh] = rows.try_emplace(r.magnitude_index, ModulusRow{r.delta_req, 0, 0.0, 0.0});
    (void)fresh;
    ModulusRow& row = it->second;
    ++row.n_certified;
    row.max_dev = std::max(row.max_dev, r.deviation);
    sums[r.magnitude_index] += r.deviation;
  }
  if (rows.empty()) throw InputError("no certified sweep records to summarise");

  ModulusReport report{{}, true, slack};
  for (auto& [index, row] : rows) {
    row.mean_dev = sums[index] / static_cast<double>(row.n_certified);
    if (!report.rows.empty() && row.max_dev > report.rows.back().max_dev + slack) report.nonincreasing = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace sspack
