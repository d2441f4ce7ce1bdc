// runner.hpp — command dispatch and report writing for the oqs CLI

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "oqs_cli/config.hpp"

namespace oqs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

struct RunOutcome {
  int exit_code{kExitOk};
  nlohmann::json results;
  std::optional<std::string> orders_csv;  // body of <prefix>_orders.csv
};

/// Runs the command without touching the filesystem.
RunOutcome execute(const RunConfig& cfg);

/// Runs the command and writes <prefix>_summary.json plus <prefix>_orders.csv where the command
/// produces per-order data. A one-line status goes to `log`.
int run(const RunConfig& cfg, std::ostream& log);

/// Library, Eigen and compiler versions.
nlohmann::json versions();

}  // namespace oqs::cli
