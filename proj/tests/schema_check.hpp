#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

// Validates against the JSON Schema keywords the output schema uses: type,
// enum, required, properties, additionalProperties (boolean), items, minItems,
// minimum and maximum. Unknown keywords are ignored. Returns one message per
// violation, each prefixed with a JSON pointer.
std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& instance);

nlohmann::json load_json(const std::filesystem::path& path);
