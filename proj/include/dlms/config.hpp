#pragma once

#include "dlms/scenario.hpp"

#include <json.hpp>

#include <filesystem>

namespace dlms {

inline constexpr int kConfigSchema = 1;

/// Parses a scenario config. Unknown keys are rejected; every error names
/// the offending field. Relative topology file paths resolve against base_dir.
ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Errc::io if the file cannot be read, Errc::config otherwise.
ScenarioConfig load_config(const std::filesystem::path& path);

Topology load_topology(const std::filesystem::path& path);

}  // namespace dlms
