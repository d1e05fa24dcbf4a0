// hannay_lab: batch front end. One subcommand per computation, each driven
// by a JSON run configuration; writes a JSON report.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hannay/cli/commands.hpp"
#include "hannay/cli/config.hpp"

namespace {

const char* describe(const std::string& command) {
  if (command == "hannay") return "Hannay angle of a parameter loop (optionally checked by the slow-drive oracle)";
  if (command == "berry") return "Berry phase of Koopman eigenstates |m, x> around a parameter loop";
  if (command == "aa-phase") return "Geometric phase of a Koopman evolution, and holonomy of ray chains";
  if (command == "verify-relation") return "Compare Berry phases with m . theta for a list of modes";
  if (command == "koopman-check") return "Unitarity, group law and composition-vs-spectral checks";
  if (command == "liouville-check") return "Monte Carlo check that flows preserve observable means";
  if (command == "resonance") return "Search for integer relations k . Omega = 0";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hannay::cli;

  CLI::App app{"Hannay angle and Berry phase laboratory for integrable families"};
  app.footer(std::string("Environment:\n  ") + kOutDirVariable +
             "  directory for reports when neither --out nor the config's \"output\" is set\n"
             "Exit status: 0 success, 1 numerical failure or tolerance breach, 2 configuration error");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "report path");
    sub->add_option("--workers", workers, "worker threads; reports do not depend on it")
        ->check(CLI::Range(1u, 256u));
    sub->add_option("--seed", seed, "overrides the config's seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig config = load_config(config_path, command, seed);
    return run(config, out, workers, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error in " << config_path << ", " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "hannay_lab: " << e.what() << "\n";
    return kExitNumerical;
  }
}
