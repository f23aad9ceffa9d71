#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace mpbvp {

using Report = nlohmann::ordered_json;

/// Serialize a report tree with stable key order and floating-point numbers
/// printed with 15 significant digits.
std::string render_report(const Report& report);

void write_report_file(const std::filesystem::path& path, const Report& report);

}  // namespace mpbvp
