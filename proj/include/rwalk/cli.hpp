#pragma once

// Command-line front end: subcommands simulate, mc, flow, gap, spectrum,
// lyapunov-scan and verify-appendix.
//
// Exit codes: 0 all checks passed, 1 checks ran and found violations,
// 2 usage, configuration or I/O error.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rwalk::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kViolations = 1, kUsage = 2 };

/// Invalid configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;

  int d = 3;
  double alpha = 10.0;
  double delta = 0.05;
  int n0 = 0;  // 0 means N0 = d

  std::uint64_t seed = 1;
  std::int64_t steps = 1000000;
  int runs = 1;
  std::int64_t thinning = 1000;
  double tail_fraction = 0.1;
  double near_radius = 0.01;

  std::vector<double> x0, y0;  // flow start; empty means a seeded random start
  double time = 10.0;
  double flow_step = 1e-3;
  int record_every = 10;

  double horizon = 1.0;
  std::vector<std::int64_t> at{1000, 100000};

  int resolution = 25;
  std::optional<double> floor;  // command default when unset
  bool no_threshold = false;
  bool dump = false;

  double kappa = 0.9;
  std::int64_t samples = 100000;
  double radius = 0.05;

  std::string out = "out";
  int workers = 0;

  /// Throws ConfigError on any invalid knob for this command.
  void validate() const;
  /// Interior floor in effect: the flag, else 0.005 for lyapunov-scan and
  /// 0.01 for verify-appendix.
  double effective_floor() const;
  /// Knobs that affect this command's results. Execution settings (workers,
  /// output directory) are left out so outputs compare equal across them.
  nlohmann::json effective_json() const;
};

/// Flat UTF-8 key=value lines. Blank lines and lines starting with '#' are
/// skipped; keys may use '-' or '_'. Throws ConfigError on a malformed line.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Parses and runs one subcommand. args excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace rwalk::cli
