#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sspack::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitUncertified = 3,
  kExitPrecision = 4,
  kExitViolation = 5,
};

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::string command;
  std::string ifs_path;
  std::string cert_path;
  double eps = 0.0;  // 0 selects the command default
  double tol = 0.0;
  int depth_cap = 0;
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  int threads = 1;
  std::size_t max_cells = 4'000'000;
  std::string out;
  std::string csv;
  std::string summary_csv;
  std::string window = "compact";
  bool balls = false;
  int depth = 4;
  std::size_t radii = 50;
  std::size_t trials = 5;
  int levels = 8;
  std::string mode = "both";
  double working_delta = 0.0;
};

// Parses argv-style arguments (without the program name) and runs the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs an already-parsed configuration; the JSON document is written to
// config.out or `out`.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

// Schema problems in a result document; empty when valid.
std::vector<std::string> validate_result(const nlohmann::json& doc);

}  // namespace sspack::cli
