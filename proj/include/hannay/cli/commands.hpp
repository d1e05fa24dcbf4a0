#pragma once

#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "hannay/cli/config.hpp"

namespace hannay::cli {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

inline constexpr const char* kOutDirVariable = "HANNAY_LAB_OUT_DIR";

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

/// Executes one configured command and builds its report. Module errors
/// become exit 1 with the error text in status.message; checks that miss
/// their tolerance also give exit 1.
RunResult execute(const RunConfig& config, unsigned workers);

/// Report path: --out, else the config's "output", else
/// $HANNAY_LAB_OUT_DIR (or the working directory) / <command>_report.json.
std::string resolve_output_path(const RunConfig& config, const std::optional<std::string>& out_flag);

/// Full run: execute, write the report (and flat tables when asked),
/// print a one-line summary to `log`. Returns the exit status.
int run(const RunConfig& config, const std::optional<std::string>& out_flag, unsigned workers,
        std::ostream& log);

}  // namespace hannay::cli
