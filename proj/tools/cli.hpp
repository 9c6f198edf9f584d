#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faraday/params.hpp"
#include "faraday/simulate.hpp"

namespace faraday::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kCommands[] = {"extend",    "geometry-check", "elliptic-verify", "linstab",
                                            "sweep",     "simulate",       "verify-ed",       "fit"};

struct GridSpec {
  int n1 = 16;
  int n2 = 16;
  int nz = 17;
};

struct SweepSpec {
  std::vector<double> amps = {0.0};
  std::vector<double> omegas = {1.0};
  int k_per_axis = 16;
  int nz = 17;
  int steps_per_period = 200;
};

/// Used by linstab; an empty k list means the default lattice samples.
struct LinstabSpec {
  std::vector<std::array<double, 2>> k;
  int k_per_axis = 16;
  int nz = 17;
  int steps_per_period = 200;
};

/// Randomized checks of extend, geometry-check and elliptic-verify.
struct VerifySpec {
  int trials = 3;
  double amplitude = 0.05;
};

struct VerifyEdSpec {
  std::string trajectory;  // empty means the output directory
};

struct FitSpec {
  std::string input;  // empty means <output>/diagnostics.csv
  std::string column = "E1";
  std::string model = "exponential";
  double t_min = 0.0;
};

struct CliConfig {
  std::string command;
  Params params;
  GridSpec grid;
  RunConfig run;
  SweepSpec sweep;
  LinstabSpec linstab;
  VerifySpec verify;
  VerifyEdSpec verify_ed;
  FitSpec fit;
  std::string output = "faraday_out";
  std::uint64_t seed = 0;
  int threads = 0;

  /// Fully expanded JSON form accepted back by parse_config.
  nlohmann::json to_json() const;
};

/// Parses and validates a JSON document. Throws ConfigError naming the offending key path on
/// unknown keys, type mismatches and constraint violations.
CliConfig parse_config(const std::string& text);

/// Runs the configured sub-command, writing outputs and manifest.json under config.output.
/// Returns 0 on success, 2 on validation failure, 3 on numerical failure.
int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Command-line entry: sub-command, --config, --output, --threads, --seed.
int main(int argc, char** argv);

}  // namespace faraday::cli
