#pragma once

// Run configuration for hannay_lab: one JSON object per run.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hannay/types.hpp"

namespace hannay::cli {

/// Unusable configuration; `where` is "line L, column C" for syntax errors
/// and the field path otherwise.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"hannay",        "berry",           "aa-phase",
                                              "verify-relation", "koopman-check", "liouville-check",
                                              "resonance"};
  return names;
}

struct FamilySpec {
  std::string kind;  // oscillator | anharmonic | mobius-rotor
  double omega = 1.0;
  double beta = 0.0;
  std::vector<double> omega_vector;  // mobius-rotor
  std::vector<double> kappa;         // mobius-rotor
};

struct LoopSpec {
  std::string kind;  // constant | circle | polyline
  std::vector<double> point;   // constant
  std::vector<double> center;  // circle
  double radius = 0.0;
  std::array<std::size_t, 2> plane{0, 1};
  double phase = 0.0;
  std::vector<std::vector<double>> vertices;  // polyline
  bool reversed = false;
  int traversals = 1;
};

struct OracleSpec {
  bool enabled = false;
  std::size_t phase_samples = 8;
  double substep = 5e-3;
};

struct ModeAmplitude {
  std::vector<int> mode;
  Complex amplitude;
};

struct LiouvilleSpec {
  std::string system = "oscillator";  // oscillator | quartic
  std::vector<double> x{1.0, 0.0, 1.0};
  std::string scheme;  // defaults by system
  double dt = 1e-2;
  double t = 10.0;
  std::size_t samples = 100000;
  std::vector<std::string> observables{"q", "p", "indicator(q>0)", "q2+p2"};
  std::string region = "disk";  // disk | box | sublevel
  std::vector<double> region_params;
};

struct RunConfig {
  std::string command;
  nlohmann::json echo;  // the configuration as read, seed override applied

  std::optional<FamilySpec> family;
  std::optional<std::vector<double>> mu;
  std::optional<LoopSpec> loop;
  std::size_t K = 256;
  std::size_t Q = 128;
  double fd_step = 1e-5;
  std::optional<std::vector<std::vector<int>>> modes;
  std::vector<double> epsilons{1e-3, 5e-4};
  OracleSpec oracle;
  std::vector<std::size_t> convergence_K;  // empty: no sweep

  // aa-phase and koopman-check
  std::optional<std::vector<double>> omega;
  std::optional<double> period;
  std::size_t samples = 10000;
  std::vector<ModeAmplitude> state;
  std::vector<std::vector<std::vector<Complex>>> chains;
  int n_max = 16;
  double t = 0.7;
  double s = 1.3;
  std::size_t trials = 16;

  LiouvilleSpec liouville;

  // resonance
  int k_max = 10;
  double resonance_tol = 1e-12;

  std::uint64_t seed = 0;
  std::optional<std::string> output;
  bool tables = false;
  bool record_wall_time = false;
  std::map<std::string, double> tolerances;  // overrides only
};

/// Parses and validates `text` for `command` (the subcommand); a "command"
/// key inside the document must agree with it.
RunConfig parse_config(const std::string& text, const std::string& command,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

RunConfig load_config(const std::string& path, const std::string& command,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace hannay::cli
