#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "urbangen/assets.hpp"
#include "urbangen/random.hpp"

namespace urbangen {

struct UniformRange {
  double lo = 0;
  double hi = 0;
};

// Weather kinds in canonical order; probability vectors index this order.
enum class WeatherKind { Clear = 0, Rain = 1, Snow = 2, Fog = 3, Overcast = 4 };
constexpr int kWeatherKindCount = 5;
const char* WeatherKindName(WeatherKind k);

struct WeatherParams {
  std::array<double, kWeatherKindCount> kind_probs{0.2, 0.2, 0.2, 0.2, 0.2};
  // Co-occurrence draws: fog can accompany rain/snow, an overcast sky can
  // accompany rain/snow/fog.
  double fog_cooccurrence = 0.5;
  double cloud_cooccurrence = 0.5;
  UniformRange density{0.2, 1.0};         // particle / fog medium strength
  UniformRange ground_density{0.2, 1.0};  // surface coverage (puddles, snow)
  UniformRange lens_effect{0.0, 0.5};     // droplet distortion on the lens
};

struct LightingParams {
  UniformRange intensity_lux{19.2, 76.8};
  UniformRange daytime_hours{8.0, 18.0};
};

// Bernoulli probabilities for the per-sub-sequence material toggles.
struct MaterialToggleProbs {
  double metallicity = 1.0;
  double roughness = 1.0;
  double normals = 1.0;
  double color = 1.0;
};

struct StreetParams {
  std::map<std::string, double> straight_weights;
  std::map<std::string, double> curve_weights;
  std::map<std::string, double> crossing_weights;
  double run_mean = 4.0;
  double run_sd = 0.45;
};

struct SubSequenceParams {
  int n_tiles = 150;
  StreetParams street;
  std::array<double, kObjectCategoryCount> existence_probs{1, 1, 1, 1, 1};
  std::array<int, kObjectCategoryCount> count_max{4, 6, 4, 8, 2};  // B, Tr, Lp, H, V
  std::array<std::map<std::string, double>, kObjectCategoryCount> asset_weights;
  WeatherParams weather;
  LightingParams lighting;
  MaterialToggleProbs material;
  double walk_weight = 0.5;
  double idle_weight = 0.5;
  // Reuse the previous sub-sequence's sampled weather and lighting instead of
  // drawing fresh ones (schedules that hold the environment fixed).
  bool inherit_environment = false;
};

struct WeatherState {
  WeatherKind kind = WeatherKind::Clear;
  bool fog_active = false;
  bool clouds_active = false;
  double density = 0;
  double ground_density = 0;
  double lens_effect = 0;
};

struct LightingState {
  double intensity_lux = 76.8;
  double daytime_hours = 12.0;
};

struct RenderToggles {
  bool metallicity = true;
  bool roughness = true;
  bool normals = true;
  bool color = true;
};

// Frame-global scene condition; tiles and actors carry everything else.
struct WorldState {
  WeatherState weather;
  LightingState lighting;
  RenderToggles render;
};

std::array<bool, kObjectCategoryCount> SampleExistence(RandomSource& src,
                                                       const SubSequenceParams& params);

WeatherState SampleWeather(RandomSource& src, const WeatherParams& params);

LightingState SampleLighting(RandomSource& src, const LightingParams& params);

RenderToggles SampleRenderToggles(RandomSource& src, const MaterialToggleProbs& probs);

// Per-category object counts: uniform over {0..count_max} where the category
// exists, exactly 0 where it does not.
std::array<int, kObjectCategoryCount> SampleObjectCounts(
    RandomSource& src, const std::array<bool, kObjectCategoryCount>& existence,
    const std::array<int, kObjectCategoryCount>& count_max);

// Samples the full frame-global state for sub-sequence t of the stream rooted
// at `root`. Inheritance walks back to the nearest explicitly sampled t.
WorldState SampleWorldState(const SeedPath& root, const std::vector<SubSequenceParams>& schedule,
                            int t);

}  // namespace urbangen
