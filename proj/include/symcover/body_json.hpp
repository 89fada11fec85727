#pragma once

#include "symcover/body.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace symcover {

/// Tagged-union JSON form of a spec: {"kind": "...", ...kind fields}.
nlohmann::json spec_to_json(const ConvexBodySpec& spec);
/// Throws BodyParse. An optional top-level "name" key is ignored.
SpecPtr spec_from_json(const nlohmann::json& j);

SpecPtr load_spec(const std::string& path);
void save_spec(const ConvexBodySpec& spec, const std::string& path);

/// FNV-1a over the canonical JSON dump.
std::uint64_t spec_hash(const ConvexBodySpec& spec);

}  // namespace symcover
