#pragma once

#include "sspack/continuity.hpp"
#include "sspack/dimension.hpp"
#include "sspack/hausdorff.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sspack {

// IFS description:
//   {"dim": d, "maps": [{"ratio": r, "rotation": [[...]] | "angle": a | "sign": +-1,
//                        "translation": [...]}], "box": {"lo": [...], "hi": [...]}}
// Throws InputError on malformed documents, DomainError on invalid maps.
Ifs ifs_from_json(const nlohmann::json& doc);
Ifs load_ifs(const std::filesystem::path& path);

// Canonical form: explicit rotation matrices, fixed key order.
nlohmann::json to_json(const Ifs& ifs);
// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string ifs_hash(const Ifs& ifs);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Ball& ball);
nlohmann::json to_json(const DimensionResult& r);
nlohmann::json to_json(const SeparationCert& cert);
nlohmann::json to_json(const MeasureBound& m);
nlohmann::json to_json(const DensityResult& r);
nlohmann::json to_json(const BallUpperBound& r);
nlohmann::json to_json(const TheoremCheckReport& r);
nlohmann::json to_json(const SweepRecord& r);
nlohmann::json to_json(const ModulusReport& r);

SeparationCert cert_from_json(const nlohmann::json& doc);

void write_scan_csv_header(std::ostream& os, int dim);
void write_scan_csv_row(std::ostream& os, const ScanRecord& rec);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_modulus_csv(std::ostream& os, const ModulusReport& report);

}  // namespace sspack
