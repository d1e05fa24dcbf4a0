#pragma once

#include <string>

#include <json.hpp>

namespace hannay::cli {

inline constexpr const char* kSchemaVersion = "1.0.0";

/// Two-space indented JSON with every floating value printed to 17
/// significant digits (so it reads back to the same double); non-finite
/// values become null. Object keys come out sorted.
std::string serialize_report(const nlohmann::json& report);

/// "%.17g", always with a decimal point or exponent.
std::string format_double(double v);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hannay::cli
