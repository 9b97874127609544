#include "urbangen/model.hpp"

#include <stdexcept>

namespace urbangen {

const char* WeatherKindName(WeatherKind k)
{
  switch (k) {
  case WeatherKind::Clear: return "clear";
  case WeatherKind::Rain: return "rain";
  case WeatherKind::Snow: return "snow";
  case WeatherKind::Fog: return "fog";
  case WeatherKind::Overcast: return "overcast";
  }
  return "?";
}

std::array<bool, kObjectCategoryCount> SampleExistence(RandomSource& src,
                                                       const SubSequenceParams& params)
{
  std::array<bool, kObjectCategoryCount> existence{};
  for (int i = 0; i < kObjectCategoryCount; ++i) {
    existence[i] = SampleBernoulli(src, params.existence_probs[i]);
  }
  return existence;
}

WeatherState SampleWeather(RandomSource& src, const WeatherParams& params)
{
  WeatherState state;
  const std::vector<double> probs(params.kind_probs.begin(), params.kind_probs.end());
  state.kind = static_cast<WeatherKind>(SampleCategorical(src, probs));

  // Draws below always run so the stream position is independent of the kind.
  const bool fog_draw = SampleBernoulli(src, params.fog_cooccurrence);
  const bool cloud_draw = SampleBernoulli(src, params.cloud_cooccurrence);
  state.density = SampleUniform(src, params.density.lo, params.density.hi);
  state.ground_density = SampleUniform(src, params.ground_density.lo, params.ground_density.hi);
  state.lens_effect = SampleUniform(src, params.lens_effect.lo, params.lens_effect.hi);

  const bool precipitation = state.kind == WeatherKind::Rain || state.kind == WeatherKind::Snow;
  state.fog_active = state.kind == WeatherKind::Fog || (precipitation && fog_draw);
  state.clouds_active =
      state.kind == WeatherKind::Overcast || ((precipitation || state.kind == WeatherKind::Fog) && cloud_draw);
  if (state.kind == WeatherKind::Clear) {
    state.fog_active = false;
    state.clouds_active = false;
    state.density = 0;
    state.ground_density = 0;
    state.lens_effect = 0;
  }
  return state;
}

LightingState SampleLighting(RandomSource& src, const LightingParams& params)
{
  LightingState state;
  state.intensity_lux = SampleUniform(src, params.intensity_lux.lo, params.intensity_lux.hi);
  state.daytime_hours = SampleUniform(src, params.daytime_hours.lo, params.daytime_hours.hi);
  return state;
}

RenderToggles SampleRenderToggles(RandomSource& src, const MaterialToggleProbs& probs)
{
  RenderToggles t;
  t.metallicity = SampleBernoulli(src, probs.metallicity);
  t.roughness = SampleBernoulli(src, probs.roughness);
  t.normals = SampleBernoulli(src, probs.normals);
  t.color = SampleBernoulli(src, probs.color);
  return t;
}

std::array<int, kObjectCategoryCount> SampleObjectCounts(
    RandomSource& src, const std::array<bool, kObjectCategoryCount>& existence,
    const std::array<int, kObjectCategoryCount>& count_max)
{
  std::array<int, kObjectCategoryCount> counts{};
  for (int i = 0; i < kObjectCategoryCount; ++i) {
    // The draw always happens so downstream draws stay aligned per tile.
    const int n = SampleUniformInt(src, 0, count_max[i]);
    counts[i] = existence[i] ? n : 0;
  }
  return counts;
}

WorldState SampleWorldState(const SeedPath& root, const std::vector<SubSequenceParams>& schedule,
                            int t)
{
  if (t < 0 || t >= static_cast<int>(schedule.size())) {
    throw std::out_of_range("sub-sequence index out of schedule");
  }
  int base = t;
  while (base > 0 && schedule[base].inherit_environment) --base;

  const SeedPath sub = root.Child("subseq", static_cast<std::uint64_t>(base));
  WorldState state;
  RandomSource weather_src = DeriveSource(sub.Child("weather"));
  state.weather = SampleWeather(weather_src, schedule[base].weather);
  RandomSource lighting_src = DeriveSource(sub.Child("lighting"));
  state.lighting = SampleLighting(lighting_src, schedule[base].lighting);

  // Material toggles are not part of environment inheritance; they belong to t.
  const SeedPath own = root.Child("subseq", static_cast<std::uint64_t>(t));
  RandomSource render_src = DeriveSource(own.Child("render"));
  state.render = SampleRenderToggles(render_src, schedule[t].material);
  return state;
}

}  // namespace urbangen
