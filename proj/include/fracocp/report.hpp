#pragma once

#include <filesystem>

#include <json.hpp>

#include "fracocp/config.hpp"
#include "fracocp/optimize.hpp"
#include "fracocp/problem.hpp"
#include "fracocp/verify.hpp"

namespace fracocp {

/// Non-finite numbers become the strings "inf", "-inf", "nan" (JSON has no literal for them).
nlohmann::json json_number(double x);

nlohmann::json to_json(const KKTReport& r);
nlohmann::json to_json(const FamilyReport& r);
nlohmann::json to_json(const LipschitzReport& r);
/// Grid, order, bounds, families and seed of a run.
nlohmann::json describe(const RunConfig& cfg);

/// Pretty-printed with a trailing newline. Key order is fixed, so equal
/// reports give byte-identical files.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace fracocp
