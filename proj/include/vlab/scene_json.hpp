#pragma once

#include <string>

#include <json.hpp>

#include "vlab/scene.hpp"

namespace vlab {

// Scene documents look like
//   {"n":2, "m":1, "primitives":[{"kind":"plane-patch", ..., "multiplicity":1,
//    "resolution":1024}, ...]}
// Parse errors carry the offending primitive index and key.
SceneSpec scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec load_scene(const std::string& path);

// Atom-array export/import for reproducibility; round-trips bit-exactly
// modulo JSON double formatting (we emit full precision).
nlohmann::json varifold_to_json(const QuadratureVarifold& v);
QuadratureVarifold varifold_from_json(const nlohmann::json& doc);

}  // namespace vlab
