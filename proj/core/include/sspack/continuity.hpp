#pragma once

#include "sspack/packing.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sspack {

enum class PerturbMode { translations, ratios, both };

PerturbMode parse_perturb_mode(const std::string& name);
const char* to_string(PerturbMode mode);

// g near f with D(f, g) <= magnitude. Translations move by at most `magnitude`,
// ratios by at most magnitude / diam(X); the draw is rescaled so the bound holds
// exactly. Draws that break box invariance are retried with halved jitter.
Ifs perturb(const Ifs& ifs, double magnitude, PerturbMode mode, std::uint64_t seed);

struct SweepRecord {
  std::size_t magnitude_index;
  std::size_t trial;
  double delta_req;
  double d_actual;
  double s_g;
  double packing_lo;
  double packing_hi;
  bool cert_ok;
  bool precision_ok;
  double deviation;  // interval-safe distance to the baseline bracket
  std::uint64_t seed;
};

struct SweepOptions {
  std::size_t trials = 5;
  PerturbMode mode = PerturbMode::both;
  std::uint64_t seed = 1;
  int threads = 1;
  // Gap used for membership in M_delta; <= 0 selects half the certified gap of f.
  double working_delta = 0.0;
  OptimizerOptions optimizer{};
};

struct SweepBaseline {
  double s;
  SeparationCert cert;  // certificate at the working gap
  DensityResult packing;
};

struct SweepResult {
  SweepBaseline baseline;
  std::vector<SweepRecord> records;
};

// (delta / 20) * 2^-k for k = 0 .. levels - 1.
std::vector<double> default_magnitudes(double delta, int levels);

// max(0, lo1 - hi2, lo2 - hi1).
inline double interval_distance(double lo1, double hi1, double lo2, double hi2) {
  const double d = lo1 > hi2 ? lo1 - hi2 : (lo2 > hi1 ? lo2 - hi1 : 0.0);
  return d;
}

// Magnitudes must be positive and descending. Records are ordered by
// (magnitude index, trial) regardless of `threads`.
SweepResult continuity_sweep(const Ifs& ifs, std::span<const double> magnitudes, const SweepOptions& options);

struct ModulusRow {
  double magnitude;
  std::size_t n_certified;
  double max_dev;
  double mean_dev;
};

struct ModulusReport {
  std::vector<ModulusRow> rows;
  bool nonincreasing;  // max_dev nonincreasing down the rows within slack
  double slack;
};

// Summarises records that certified and converged. Throws InputError when none did.
ModulusReport modulus_report(const std::vector<SweepRecord>& records, double slack);

}  // namespace sspack
