#pragma once

#include <string>

#include <json.hpp>

#include "pdlink/link.hpp"

namespace pdlink {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// JSON round trip. Unknown keys are rejected so typos fail loudly; physical
// fields carry their unit in the name.
nlohmann::json config_to_json(const LinkConfig& cfg);
LinkConfig config_from_json(const nlohmann::json& j);

LinkConfig load_config(const std::string& path);
void save_config(const LinkConfig& cfg, const std::string& path);

// Applies "dotted.path=value" onto the JSON form; value is parsed as JSON
// when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// FNV-1a 64 over the canonical (sorted-key) dump; 16 hex digits. Two configs
// share a digest iff every semantic field matches.
std::string config_digest(const LinkConfig& cfg);

}  // namespace pdlink
