#include "urbangen/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "urbangen/assets.hpp"
#include "urbangen/random.hpp"
#include "urbangen/tiles.hpp"

namespace urbangen {

namespace {

using njson = nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void Fail(const std::string& where, const std::string& what)
{
  throw std::runtime_error("config: " + where + ": " + what);
}

// Every object is checked against the closed set of keys it may contain, so a
// misspelled or misplaced key is reported instead of silently ignored.
void RequireKnownKeys(const njson& obj, const std::string& where,
                      std::initializer_list<const char*> allowed)
{
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) Fail(where, "unknown key '" + item.key() + "'");
  }
}

double GetNumber(const njson& v, const std::string& where)
{
  if (!v.is_number()) Fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) Fail(where, "expected a finite number");
  return x;
}

double GetProb(const njson& v, const std::string& where)
{
  const double x = GetNumber(v, where);
  if (x < 0.0 || x > 1.0) Fail(where, "expected a probability in [0, 1]");
  return x;
}

int GetInt(const njson& v, const std::string& where, int lo)
{
  if (!v.is_number_integer()) Fail(where, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo) Fail(where, "expected an integer >= " + std::to_string(lo));
  return static_cast<int>(x);
}

UniformRange GetRange(const njson& v, const std::string& where, double lo_bound, double hi_bound)
{
  if (!v.is_array() || v.size() != 2) Fail(where, "expected a [lo, hi] pair");
  UniformRange r;
  r.lo = GetNumber(v[0], where);
  r.hi = GetNumber(v[1], where);
  if (r.lo > r.hi) Fail(where, "lo exceeds hi");
  if (r.lo < lo_bound || r.hi > hi_bound) {
    std::ostringstream os;
    os << "bounds must lie in [" << lo_bound << ", " << hi_bound << "]";
    Fail(where, os.str());
  }
  return r;
}

std::map<std::string, double> GetWeightMap(const njson& v, const std::string& where)
{
  if (!v.is_object()) Fail(where, "expected an identifier -> weight object");
  std::map<std::string, double> out;
  for (const auto& item : v.items()) {
    const double w = GetNumber(item.value(), where + "." + item.key());
    if (w < 0.0) Fail(where + "." + item.key(), "weights must be non-negative");
    out[item.key()] = w;
  }
  return out;
}

// Local copy of the per-family street sub-catalog (the catalog stores layout
// families as groups); used only to validate identifiers at parse time.
AssetCategory StreetFamilyCategory(int family)
{
  const AssetCategory& street = BuiltinCatalog().street;
  const AssetGroup& group = street.groups[family];
  AssetCategory cat;
  cat.name = group.id;
  cat.groups.push_back(AssetGroup{group.id, 0, group.count});
  for (int i = 0; i < group.count; ++i) {
    cat.entries.push_back(AssetEntry{street.entries[group.first + i].id, 0});
  }
  return cat;
}

void ValidateAssetMapping(const AssetCategory& category, const std::map<std::string, double>& map,
                          const std::string& where)
{
  try {
    ResolveAssetWeights(category, map);
  } catch (const std::exception& e) {
    Fail(where, e.what());
  }
}

void ParseKindProbs(const njson& v, const std::string& where,
                    std::array<double, kWeatherKindCount>& out)
{
  if (v.is_array()) {
    if (v.size() != kWeatherKindCount) Fail(where, "expected 5 entries");
    for (int k = 0; k < kWeatherKindCount; ++k) out[k] = GetProb(v[k], where);
  } else if (v.is_object()) {
    out.fill(0.0);
    for (const auto& item : v.items()) {
      int k = 0;
      while (k < kWeatherKindCount &&
             item.key() != WeatherKindName(static_cast<WeatherKind>(k))) {
        ++k;
      }
      if (k == kWeatherKindCount) Fail(where, "unknown key '" + item.key() + "'");
      out[k] = GetProb(item.value(), where + "." + item.key());
    }
  } else {
    Fail(where, "expected an object or a 5-array");
  }
  double sum = 0.0;
  for (double p : out) sum += p;
  if (std::abs(sum - 1.0) > 1e-9) Fail(where, "probabilities must sum to 1");
}

void ParseStreet(const njson& v, const std::string& where, StreetParams& out)
{
  RequireKnownKeys(v, where, {"straight", "curve", "crossing", "run_mean", "run_sd"});
  const char* families[3] = {"straight", "curve", "crossing"};
  std::map<std::string, double>* maps[3] = {&out.straight_weights, &out.curve_weights,
                                            &out.crossing_weights};
  for (int f = 0; f < 3; ++f) {
    if (!v.contains(families[f])) continue;
    const std::string fw = where + "." + families[f];
    *maps[f] = GetWeightMap(v[families[f]], fw);
    ValidateAssetMapping(StreetFamilyCategory(f), *maps[f], fw);
  }
  if (v.contains("run_mean")) {
    out.run_mean = GetNumber(v["run_mean"], where + ".run_mean");
    if (out.run_mean <= 0.0) Fail(where + ".run_mean", "expected a positive mean");
  }
  if (v.contains("run_sd")) {
    out.run_sd = GetNumber(v["run_sd"], where + ".run_sd");
    if (out.run_sd < 0.0) Fail(where + ".run_sd", "expected a non-negative deviation");
  }
}

// Maps a category-named object onto a per-category array via the callback.
template <typename Fn>
void ForEachCategoryKey(const njson& v, const std::string& where, Fn&& fn)
{
  for (const auto& item : v.items()) {
    int c = 0;
    while (c < kObjectCategoryCount &&
           item.key() != CategoryName(static_cast<ObjectCategory>(c))) {
      ++c;
    }
    if (c == kObjectCategoryCount) Fail(where, "unknown key '" + item.key() + "'");
    fn(c, item.value(), where + "." + item.key());
  }
}

void ParseWeather(const njson& v, const std::string& where, WeatherParams& out)
{
  RequireKnownKeys(v, where,
                   {"kind_probs", "fog_cooccurrence", "cloud_cooccurrence", "density",
                    "ground_density", "lens_effect"});
  if (v.contains("kind_probs")) ParseKindProbs(v["kind_probs"], where + ".kind_probs", out.kind_probs);
  if (v.contains("fog_cooccurrence"))
    out.fog_cooccurrence = GetProb(v["fog_cooccurrence"], where + ".fog_cooccurrence");
  if (v.contains("cloud_cooccurrence"))
    out.cloud_cooccurrence = GetProb(v["cloud_cooccurrence"], where + ".cloud_cooccurrence");
  if (v.contains("density")) out.density = GetRange(v["density"], where + ".density", 0.0, 1.0);
  if (v.contains("ground_density"))
    out.ground_density = GetRange(v["ground_density"], where + ".ground_density", 0.0, 1.0);
  if (v.contains("lens_effect"))
    out.lens_effect = GetRange(v["lens_effect"], where + ".lens_effect", 0.0, 1.0);
}

void ParseLighting(const njson& v, const std::string& where, LightingParams& out)
{
  RequireKnownKeys(v, where, {"intensity_lux", "daytime_hours"});
  if (v.contains("intensity_lux")) {
    out.intensity_lux = GetRange(v["intensity_lux"], where + ".intensity_lux", 0.0, 1e6);
    if (out.intensity_lux.lo <= 0.0) Fail(where + ".intensity_lux", "expected a positive level");
  }
  if (v.contains("daytime_hours"))
    out.daytime_hours = GetRange(v["daytime_hours"], where + ".daytime_hours", 0.0, 24.0);
}

void ParseMaterial(const njson& v, const std::string& where, MaterialToggleProbs& out)
{
  RequireKnownKeys(v, where, {"metallicity", "roughness", "normals", "color"});
  if (v.contains("metallicity")) out.metallicity = GetProb(v["metallicity"], where + ".metallicity");
  if (v.contains("roughness")) out.roughness = GetProb(v["roughness"], where + ".roughness");
  if (v.contains("normals")) out.normals = GetProb(v["normals"], where + ".normals");
  if (v.contains("color")) out.color = GetProb(v["color"], where + ".color");
}

void ParseSubSequence(const njson& v, const std::string& where, SubSequenceParams& out)
{
  RequireKnownKeys(v, where,
                   {"n_tiles", "street", "existence", "count_max", "assets", "weather",
                    "lighting", "material", "animation", "inherit_environment"});
  if (v.contains("n_tiles")) out.n_tiles = GetInt(v["n_tiles"], where + ".n_tiles", 1);
  if (v.contains("street")) ParseStreet(v["street"], where + ".street", out.street);
  if (v.contains("existence")) {
    ForEachCategoryKey(v["existence"], where + ".existence",
                       [&](int c, const njson& val, const std::string& w) {
                         out.existence_probs[c] = GetProb(val, w);
                       });
  }
  if (v.contains("count_max")) {
    ForEachCategoryKey(v["count_max"], where + ".count_max",
                       [&](int c, const njson& val, const std::string& w) {
                         out.count_max[c] = GetInt(val, w, 0);
                       });
  }
  if (v.contains("assets")) {
    ForEachCategoryKey(v["assets"], where + ".assets",
                       [&](int c, const njson& val, const std::string& w) {
                         out.asset_weights[c] = GetWeightMap(val, w);
                         ValidateAssetMapping(
                             BuiltinCatalog().Of(static_cast<ObjectCategory>(c)),
                             out.asset_weights[c], w);
                       });
  }
  if (v.contains("weather")) ParseWeather(v["weather"], where + ".weather", out.weather);
  if (v.contains("lighting")) ParseLighting(v["lighting"], where + ".lighting", out.lighting);
  if (v.contains("material")) ParseMaterial(v["material"], where + ".material", out.material);
  if (v.contains("animation")) {
    const njson& a = v["animation"];
    RequireKnownKeys(a, where + ".animation", {"walk", "idle"});
    if (a.contains("walk")) {
      out.walk_weight = GetNumber(a["walk"], where + ".animation.walk");
      if (out.walk_weight < 0.0) Fail(where + ".animation.walk", "weights must be non-negative");
    }
    if (a.contains("idle")) {
      out.idle_weight = GetNumber(a["idle"], where + ".animation.idle");
      if (out.idle_weight < 0.0) Fail(where + ".animation.idle", "weights must be non-negative");
    }
  }
  if (v.contains("inherit_environment")) {
    if (!v["inherit_environment"].is_boolean())
      Fail(where + ".inherit_environment", "expected a boolean");
    out.inherit_environment = v["inherit_environment"].get<bool>();
  }
}

void ParseModes(const njson& v, const std::string& where, RenderModes& out)
{
  if (!v.is_array()) Fail(where, "expected an array of mode names");
  out = RenderModes{false, false, false, false};
  for (const auto& entry : v) {
    if (!entry.is_string()) Fail(where, "expected mode names as strings");
    const std::string name = entry.get<std::string>();
    if (name == "color") out.color = true;
    else if (name == "semantic") out.semantic = true;
    else if (name == "depth") out.depth = true;
    else if (name == "normal") out.normal = true;
    else Fail(where, "unknown mode '" + name + "'");
  }
}

njson RangeJson(const UniformRange& r) { return njson::array({r.lo, r.hi}); }

njson WeightMapJson(const std::map<std::string, double>& m)
{
  njson out = njson::object();
  for (const auto& [id, w] : m) out[id] = w;
  return out;
}

}  // namespace

StreamConfig ParseConfig(const std::string& json_text)
{
  njson doc;
  try {
    doc = njson::parse(json_text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) Fail("top level", "expected an object");
  RequireKnownKeys(doc, "top level",
                   {"seed", "resolution", "fps", "camera", "modes", "window_tiles",
                    "cruise_speed", "capture_stride", "subsequences", "preset"});

  StreamConfig c;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() ||
        (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
         doc["seed"].get<long long>() < 0)) {
      Fail("seed", "expected a non-negative integer");
    }
    c.globals.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("resolution")) {
    const njson& r = doc["resolution"];
    if (!r.is_array() || r.size() != 2) Fail("resolution", "expected [width, height]");
    c.globals.width = GetInt(r[0], "resolution", 16);
    c.globals.height = GetInt(r[1], "resolution", 16);
  }
  if (doc.contains("fps")) {
    c.globals.fps = GetNumber(doc["fps"], "fps");
    if (c.globals.fps <= 0.0) Fail("fps", "expected a positive rate");
  }
  if (doc.contains("camera")) {
    const njson& cam = doc["camera"];
    RequireKnownKeys(cam, "camera", {"fov_degrees", "shutter_seconds", "iso", "aperture"});
    if (cam.contains("fov_degrees")) {
      c.globals.fov_degrees = GetNumber(cam["fov_degrees"], "camera.fov_degrees");
      if (c.globals.fov_degrees <= 0.0 || c.globals.fov_degrees >= 180.0)
        Fail("camera.fov_degrees", "expected an angle in (0, 180)");
    }
    if (cam.contains("shutter_seconds")) {
      c.globals.shutter_seconds = GetNumber(cam["shutter_seconds"], "camera.shutter_seconds");
      if (c.globals.shutter_seconds <= 0.0) Fail("camera.shutter_seconds", "expected > 0");
    }
    if (cam.contains("iso")) {
      c.globals.iso = GetNumber(cam["iso"], "camera.iso");
      if (c.globals.iso <= 0.0) Fail("camera.iso", "expected > 0");
    }
    if (cam.contains("aperture")) {
      c.globals.aperture = GetNumber(cam["aperture"], "camera.aperture");
      if (c.globals.aperture <= 0.0) Fail("camera.aperture", "expected > 0");
    }
  }
  if (doc.contains("modes")) ParseModes(doc["modes"], "modes", c.globals.modes);
  if (doc.contains("window_tiles")) {
    c.globals.window_tiles = GetInt(doc["window_tiles"], "window_tiles", 3);
  }
  if (doc.contains("cruise_speed")) {
    c.globals.cruise_speed = GetNumber(doc["cruise_speed"], "cruise_speed");
    if (c.globals.cruise_speed <= 0.0) Fail("cruise_speed", "expected a positive speed");
  }
  if (doc.contains("capture_stride")) {
    c.globals.capture_stride = GetInt(doc["capture_stride"], "capture_stride", 1);
  }
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) Fail("preset", "expected a string");
    c.preset = doc["preset"].get<std::string>();
  }

  if (!doc.contains("subsequences")) Fail("subsequences", "required key is missing");
  const njson& seq = doc["subsequences"];
  if (!seq.is_array() || seq.empty()) Fail("subsequences", "expected a non-empty array");
  c.schedule.resize(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const std::string where = "subsequences[" + std::to_string(t) + "]";
    if (!seq[t].is_object()) Fail(where, "expected an object");
    ParseSubSequence(seq[t], where, c.schedule[t]);
  }
  return c;
}

StreamConfig LoadConfigFile(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string CanonicalConfigJson(const StreamConfig& config)
{
  njson doc;
  doc["seed"] = config.globals.seed;
  doc["resolution"] = njson::array({config.globals.width, config.globals.height});
  doc["fps"] = config.globals.fps;
  doc["camera"] = {{"fov_degrees", config.globals.fov_degrees},
                   {"shutter_seconds", config.globals.shutter_seconds},
                   {"iso", config.globals.iso},
                   {"aperture", config.globals.aperture}};
  njson modes = njson::array();
  if (config.globals.modes.color) modes.push_back("color");
  if (config.globals.modes.semantic) modes.push_back("semantic");
  if (config.globals.modes.depth) modes.push_back("depth");
  if (config.globals.modes.normal) modes.push_back("normal");
  doc["modes"] = modes;
  doc["window_tiles"] = config.globals.window_tiles;
  doc["cruise_speed"] = config.globals.cruise_speed;
  doc["capture_stride"] = config.globals.capture_stride;
  doc["preset"] = config.preset;

  njson seq = njson::array();
  for (const SubSequenceParams& s : config.schedule) {
    njson v;
    v["n_tiles"] = s.n_tiles;
    v["street"] = {{"straight", WeightMapJson(s.street.straight_weights)},
                   {"curve", WeightMapJson(s.street.curve_weights)},
                   {"crossing", WeightMapJson(s.street.crossing_weights)},
                   {"run_mean", s.street.run_mean},
                   {"run_sd", s.street.run_sd}};
    njson existence = njson::object();
    njson count_max = njson::object();
    njson assets = njson::object();
    for (int c = 0; c < kObjectCategoryCount; ++c) {
      const char* name = CategoryName(static_cast<ObjectCategory>(c));
      existence[name] = s.existence_probs[c];
      count_max[name] = s.count_max[c];
      assets[name] = WeightMapJson(s.asset_weights[c]);
    }
    v["existence"] = existence;
    v["count_max"] = count_max;
    v["assets"] = assets;
    njson kind_probs = njson::object();
    for (int k = 0; k < kWeatherKindCount; ++k) {
      kind_probs[WeatherKindName(static_cast<WeatherKind>(k))] = s.weather.kind_probs[k];
    }
    v["weather"] = {{"kind_probs", kind_probs},
                    {"fog_cooccurrence", s.weather.fog_cooccurrence},
                    {"cloud_cooccurrence", s.weather.cloud_cooccurrence},
                    {"density", RangeJson(s.weather.density)},
                    {"ground_density", RangeJson(s.weather.ground_density)},
                    {"lens_effect", RangeJson(s.weather.lens_effect)}};
    v["lighting"] = {{"intensity_lux", RangeJson(s.lighting.intensity_lux)},
                     {"daytime_hours", RangeJson(s.lighting.daytime_hours)}};
    v["material"] = {{"metallicity", s.material.metallicity},
                     {"roughness", s.material.roughness},
                     {"normals", s.material.normals},
                     {"color", s.material.color}};
    v["animation"] = {{"walk", s.walk_weight}, {"idle", s.idle_weight}};
    v["inherit_environment"] = s.inherit_environment;
    seq.push_back(std::move(v));
  }
  doc["subsequences"] = std::move(seq);
  // nlohmann's default json is map-backed, so dump() emits sorted keys and the
  // serialization is a pure function of the parsed values.
  return doc.dump();
}

std::uint64_t ConfigHash(const StreamConfig& config)
{
  return HashString(CanonicalConfigJson(config));
}

StreamConfig BuildPreset(const std::string& name, std::uint64_t seed, const std::string& split)
{
  if (split != "train" && split != "test") {
    throw std::runtime_error("config: unknown split '" + split + "' (train or test)");
  }
  StreamConfig c;
  c.preset = name;
  c.globals.seed = split == "test" ? SeedPath(seed).Child("test-split").Hash() : seed;

  if (name == "incremental_class") {
    // Buildings stay on throughout; one movable class enters per sub-sequence,
    // vehicles last. Environment is sampled once and inherited so appearance
    // shift does not confound the class schedule.
    c.schedule.resize(4);
    const int extra[4] = {1, 2, 3, 4};  // tree, lamp, human, vehicle
    for (int t = 0; t < 4; ++t) {
      c.schedule[t].existence_probs = {1, 0, 0, 0, 0};
      c.schedule[t].existence_probs[extra[t]] = 1;
      c.schedule[t].inherit_environment = t > 0;
    }
  } else if (name == "incremental_lighting") {
    // Illumination halves (roughly) per sub-sequence while everything else
    // stays maximal: clear sky, fixed midday sun, all classes present.
    c.schedule.resize(5);
    const double levels[5] = {76.8, 19.2, 9.6, 2.4, 1.2};
    for (int t = 0; t < 5; ++t) {
      c.schedule[t].weather.kind_probs = {1, 0, 0, 0, 0};
      c.schedule[t].lighting.intensity_lux = UniformRange{levels[t], levels[t]};
      c.schedule[t].lighting.daytime_hours = UniformRange{13.0, 13.0};
    }
  } else if (name == "incremental_weather") {
    // One weather kind per sub-sequence in canonical order, under fixed bright
    // lighting so the weather is the only scheduled change.
    c.schedule.resize(5);
    for (int t = 0; t < 5; ++t) {
      c.schedule[t].weather.kind_probs = {0, 0, 0, 0, 0};
      c.schedule[t].weather.kind_probs[t] = 1;
      c.schedule[t].lighting.intensity_lux = UniformRange{76.8, 76.8};
      c.schedule[t].lighting.daytime_hours = UniformRange{13.0, 13.0};
    }
  } else {
    throw std::runtime_error("config: unknown preset '" + name + "'");
  }
  return c;
}

CameraIntrinsics IntrinsicsOf(const StreamGlobals& globals)
{
  CameraIntrinsics intr;
  intr.width = globals.width;
  intr.height = globals.height;
  intr.fps = globals.fps;
  intr.fov_horizontal = globals.fov_degrees * kPi / 180.0;
  intr.shutter_seconds = globals.shutter_seconds;
  intr.iso = globals.iso;
  intr.aperture = globals.aperture;
  return intr;
}

}  // namespace urbangen
