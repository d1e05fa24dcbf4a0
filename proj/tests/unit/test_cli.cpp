#include <doctest.h>

#include <string>

#include "hannay/cli/commands.hpp"
#include "hannay/cli/config.hpp"
#include "hannay/cli/report_writer.hpp"

using namespace hannay::cli;

namespace {

std::string where_of(const std::string& text, const std::string& command) {
  try {
    parse_config(text, command);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "";
}

const char* kConstant = R"({
  "family": "oscillator",
  "mu": 1.0,
  "loop": {"kind": "constant", "point": [2.0, 0.3, 1.0]},
  "modes": {"range": [-3, 3]},
  "K": 64, "Q": 32
})";

}  // namespace

TEST_CASE("double formatting round-trips") {
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "null");
  for (double v : {0.075247802777390238, 1e22, 3.0e-7, -1234.5678}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  const nlohmann::json j = {{"b", 1}, {"a", {1.5, 2}}, {"c", "x"}};
  CHECK(serialize_report(j) == "{\n  \"a\": [1.5, 2],\n  \"b\": 1,\n  \"c\": \"x\"\n}\n");
}

TEST_CASE("config diagnostics") {
  CHECK(where_of(R"({"family": "oscillator", "loop": {"kind": "constant", "point": [1,0,1]}})", "hannay") ==
        "field 'mu'");
  CHECK(where_of("{\n  \"mu\": 1.0,\n  \"family\": oscillator\n}", "hannay") == "line 3, column 13");
  CHECK(where_of(R"({"mu": 1, "colour": 3})", "hannay") == "field 'colour'");
  CHECK(where_of(R"({"mu": [1, "a"]})", "hannay") == "field 'mu[1]'");
  CHECK(where_of(R"({"command": "berry"})", "hannay") == "field 'command'");
  CHECK(where_of(R"({"family": {"kind": "pendulum"}})", "hannay") == "field 'family.kind'");
  CHECK(where_of(R"({"omega": [1, 1], "K_max": 0})", "resonance") == "field 'K_max'");
  CHECK(where_of(kConstant, "verify-relation").empty());
  const auto c = parse_config(kConstant, "verify-relation", 42u);
  CHECK(c.seed == 42u);
  CHECK(c.echo["seed"] == 42);
  CHECK(c.modes->size() == 7);
}

TEST_CASE("verify-relation on the constant loop") {
  const auto cfg = parse_config(kConstant, "verify-relation");
  const auto r = execute(cfg, 2);
  CHECK(r.exit_code == kExitOk);
  const auto& res = r.report["results"];
  CHECK(res["theta"]["raw"][0].get<double>() == 0.0);
  for (const auto& row : res["rows"]) {
    CHECK(row["beta"].get<double>() == 0.0);
    CHECK(row["residual"].get<double>() == 0.0);
  }
  CHECK(res["s_zero"]["from_zero_mode"].get<bool>());
  CHECK(res["s_zero"]["from_constant_loop"].get<bool>());
  for (const char* key : {"schema_version", "command", "config", "results", "tolerances", "timing", "status"}) {
    CHECK(r.report.contains(key));
  }
}

TEST_CASE("report bytes do not depend on workers") {
  const char* text = R"({
    "family": "oscillator", "mu": 1.0,
    "loop": {"kind": "circle", "center": [2.0, 0.0, 1.0], "radius": 0.5},
    "modes": [[1], [2]], "K": 64, "Q": 32,
    "oracle": {"phase_samples": 2}, "epsilons": [0.02, 0.01]
  })";
  const auto cfg = parse_config(text, "verify-relation");
  const auto a = serialize_report(execute(cfg, 1).report);
  const auto b = serialize_report(execute(cfg, 6).report);
  CHECK(a == b);
}

TEST_CASE("tolerance breaches and module errors exit 1") {
  const char* tight = R"({
    "family": "oscillator", "mu": 1.0,
    "loop": {"kind": "circle", "center": [2.0, 0.0, 1.0], "radius": 0.5},
    "modes": [[1]], "K": 64, "Q": 32, "tolerances": {"relation_residual": 1e-12}
  })";
  const auto r = execute(parse_config(tight, "verify-relation"), 1);
  CHECK(r.exit_code == kExitNumerical);
  CHECK(r.report["status"]["outcome"] == "fail");

  const char* outside = R"({
    "family": "oscillator", "mu": 1.0,
    "loop": {"kind": "circle", "center": [1.0, 0.0, 1.0], "radius": 2.0}
  })";
  const auto e = execute(parse_config(outside, "hannay"), 1);
  CHECK(e.exit_code == kExitNumerical);
  CHECK(e.report["status"]["outcome"] == "error");
  CHECK(e.report["status"]["message"].get<std::string>().find("XZ - Y^2 > 0") != std::string::npos);

  const char* unknown_tol = R"({"omega": [1, 2], "tolerances": {"group_law": 1e-12, "speed": 1}})";
  CHECK_THROWS_AS(execute(parse_config(unknown_tol, "koopman-check"), 1), ConfigError);
}
