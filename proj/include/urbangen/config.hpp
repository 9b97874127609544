#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbangen/model.hpp"
#include "urbangen/renderer.hpp"

namespace urbangen {

// Stream-global settings: everything outside the per-sub-sequence parameter
// blocks. Thread count and output paths are runtime flags, not configuration,
// so configs hash identically regardless of how they are executed.
struct StreamGlobals {
  std::uint64_t seed = 1;
  int width = 960;
  int height = 540;
  double fps = 30.0;
  double fov_degrees = 90.0;
  double shutter_seconds = 1.0;
  double iso = 100.0;
  double aperture = 1.0;
  RenderModes modes;
  int window_tiles = 7;
  double cruise_speed = 8.0;
  // Frames between captures; 30 fps / 6 = 5 captured frames per second.
  int capture_stride = 6;
};

struct StreamConfig {
  StreamGlobals globals;
  std::vector<SubSequenceParams> schedule;
  std::string preset;  // empty for hand-written configs
};

// Parses and validates a JSON configuration document. Unknown keys are
// rejected and every validation error names the offending key; omitted keys
// take the documented defaults. Throws std::runtime_error.
StreamConfig ParseConfig(const std::string& json_text);
StreamConfig LoadConfigFile(const std::string& path);

// Canonical serialization: every field emitted, keys sorted. Identical
// configs, however they were written, serialize to identical bytes.
std::string CanonicalConfigJson(const StreamConfig& config);
std::uint64_t ConfigHash(const StreamConfig& config);

// Scenario presets: incremental_class, incremental_lighting and
// incremental_weather, each with 150-tile sub-sequences. The test split runs
// the same schedule under a seed derived disjointly from the train seed.
StreamConfig BuildPreset(const std::string& name, std::uint64_t seed, const std::string& split);

CameraIntrinsics IntrinsicsOf(const StreamGlobals& globals);

}  // namespace urbangen
