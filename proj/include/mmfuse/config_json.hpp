#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mmfuse/fusion.hpp"
#include "mmfuse/scene_sim.hpp"

namespace mmfuse {

// JSON documents use snake_case keys matching the struct fields and SI
// units. Unknown keys are rejected with ConfigError; missing keys keep
// their defaults.

RadarConfig radar_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RadarConfig& config);

Roi roi_from_json(const nlohmann::json& j);

/// Either {"radars": [{"role", "rotation" (row-major 3x3), "translation"}, ...]}
/// or the parametric default {"pitch_deg", "baseline", "height"}.
Rig rig_from_json(const nlohmann::json& j);

FusionParams fusion_params_from_json(const nlohmann::json& j);

/// Top level: {"radar": {...}, "roi": {...}, "rig": {...}, "fusion": {...}}.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

/// {"noise_std", "seed", "scatterers": [{"position", "amplitude", "velocity",
///   "keyframes": [{"frame", "position"}, ...]}]}
SceneTrajectory scene_from_json(const nlohmann::json& j);

/// Parses a file; syntax errors surface as ConfigError with the path.
nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace mmfuse
