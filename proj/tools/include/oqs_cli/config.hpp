// config.hpp — experiment configuration: INI parsing, validation, and JSON echo

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oqs/bathcorr.hpp"
#include "oqs/model.hpp"
#include "oqs/oracle.hpp"

namespace oqs::cli {

/// Usage or configuration problem; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> kCommands{"observable",     "bound",  "check-wick", "check-comb",
                                                "check-identity", "oracle", "convergence"};

struct SystemSection {
  std::string preset{"spin_boson"};  // spin_boson | explicit
  double epsilon{1.0};
  double delta{0.0};
  std::string observable{"sigma_z"};
  std::string initial_state{"up"};
  // explicit preset
  Operator h_s, w_s, o_s, rho_s;

  [[nodiscard]] SystemSpec build() const;
};

struct BathSection {
  std::string kind{"modes"};  // modes | table | spectral
  std::vector<double> omega;
  std::vector<double> coupling;
  double beta{1.0};
  std::filesystem::path table;
  // spectral = ohmic: J(w) = (pi/2) alpha w exp(-w / omega_c), midpoint cells on [0, omega_max]
  double alpha{0.0};
  double omega_c{1.0};
  double omega_max{0.0};
  int n_modes{0};
  // perturbed_bath only: rescale the base modes instead of listing new ones
  double coupling_scale{1.0};
  double omega_scale{1.0};

  [[nodiscard]] CorrelationSource build(const std::optional<BathSpec>& base = std::nullopt) const;
};

struct CheckSection {
  int m{4};
  int samples{50};
  double si{0.0};
  std::optional<double> sf;  // default 2t
  std::string correlation{"bath"};  // bath | constant
  cplx constant{1.0, 0.0};
  int quad_points{32};
  bool first_order{true};
  double eps_coarse{1e-2};
  double eps_fine{1e-3};
  double wick_tolerance{1e-6};
};

struct RunConfig {
  std::string command;
  std::filesystem::path config_path;
  std::string out{"oqs"};
  SystemSection system;
  BathSection bath;
  std::optional<BathSection> perturbed_bath;
  DysonConfig dyson;
  FockTruncation truncation;
  CheckSection check;
};

/// Command-line overrides applied after the file is read.
struct Overrides {
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> m;
};

/// Parses and validates an INI file. Unknown sections or keys, malformed values and range
/// violations raise ConfigError naming file, line and key path. OQS_MEMORY_CEILING, when set,
/// replaces truncation.memory_ceiling.
RunConfig parse_config(const std::string& command, const std::filesystem::path& path,
                       const Overrides& overrides = {});

/// Every effective parameter, defaults included.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace oqs::cli
