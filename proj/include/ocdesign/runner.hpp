#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "ocdesign/config.hpp"

namespace ocdesign {

struct RunOptions {
  std::string subcommand;  // optimize | bootstrap | contour | simulate | proxy-check
  std::string config_path;
  std::string out_dir = ".";
  std::optional<uint64_t> seed;
  std::optional<int> m;
  std::optional<int> threads;
  bool fractional = false;
  std::optional<double> fixed_gamma;
  std::optional<int> m_star;
  std::optional<int> big_m;
  std::optional<int> n_b;  // simulate only
};

// Executes a subcommand, writes report.json and the subcommand artifacts
// into out_dir, and returns the report. Throws on failure.
nlohmann::json run_to_report(const RunOptions& options);

// CLI wrapper: machine-readable result to stdout, progress to stderr, and
// exceptions mapped to exit codes {0 ok, 1 usage/config, 2 infeasible,
// 3 numerical}.
int run(const RunOptions& options);

}  // namespace ocdesign
