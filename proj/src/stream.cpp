#include "urbangen/stream.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "urbangen/dynamics.hpp"
#include "urbangen/invariants.hpp"
#include "urbangen/png_io.hpp"
#include "urbangen/tiles.hpp"

namespace urbangen {

namespace {

namespace fsys = std::filesystem;
using njson = nlohmann::json;
using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void EnsureDir(const fsys::path& p)
{
  std::error_code ec;
  fsys::create_directories(p, ec);
  if (ec) throw std::runtime_error("stream: cannot create " + p.string() + ": " + ec.message());
}

std::string FrameFileName(int subseq, long frame)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d_%06ld.png", subseq, frame);
  return buf;
}

njson WorldJson(const WorldState& w)
{
  return njson{
      {"weather",
       {{"kind", WeatherKindName(w.weather.kind)},
        {"fog_active", w.weather.fog_active},
        {"clouds_active", w.weather.clouds_active},
        {"density", w.weather.density},
        {"ground_density", w.weather.ground_density},
        {"lens_effect", w.weather.lens_effect}}},
      {"lighting",
       {{"intensity_lux", w.lighting.intensity_lux}, {"daytime_hours", w.lighting.daytime_hours}}},
      {"render",
       {{"metallicity", w.render.metallicity},
        {"roughness", w.render.roughness},
        {"normals", w.render.normals},
        {"color", w.render.color}}}};
}

njson BoxJson(const BoundingBox& b)
{
  return njson{{"x", b.x},     {"y", b.y},        {"w", b.w},
               {"h", b.h},     {"label", b.label}, {"instance", b.instance_id}};
}

const char* TransformName(PatchTransform t)
{
  switch (t) {
  case PatchTransform::None: return "none";
  case PatchTransform::ColorRatio: return "colorratio";
  case PatchTransform::Lbp: return "lbp";
  }
  return "none";
}

}  // namespace

std::vector<std::string> WriteFrameSet(const FrameSet& frame, const RenderModes& modes,
                                       const std::string& root)
{
  const std::string name = FrameFileName(frame.meta.subseq, frame.meta.frame_index);
  std::vector<std::string> paths;
  const auto emit = [&](const char* mode, std::vector<std::uint8_t> bytes) {
    EnsureDir(fsys::path(root) / mode);
    const std::string rel = std::string(mode) + "/" + name;
    WriteFileBytes(root + "/" + rel, bytes);
    paths.push_back(rel);
  };
  if (modes.color) emit("color", EncodePngRgb8(frame.color));
  if (modes.semantic) emit("semantic", EncodePngGray8(frame.semantic));
  if (modes.depth) emit("depth", EncodePngGray16(frame.depth));
  if (modes.normal) emit("normal", EncodePngRgb8(frame.normal));
  return paths;
}

StreamResult RunStream(const StreamConfig& config, const std::string& output_root,
                       const StreamRunOptions& options)
{
  const Clock::time_point t_start = Clock::now();
  const StreamGlobals& g = config.globals;
  if (config.schedule.empty()) throw std::runtime_error("stream: empty schedule");
  if (options.emit_patches && (!g.modes.color || !g.modes.semantic)) {
    throw std::runtime_error("stream: patch extraction needs the color and semantic modes");
  }

  const fsys::path rootp(output_root);
  EnsureDir(rootp);
  if (options.emit_patches) EnsureDir(rootp / "patches");

  // The exact generating configuration ships with the outputs; together with
  // the manifest header it makes every artifact re-derivable.
  WriteFileBytes((rootp / "config.json").string(), [&] {
    const std::string text = CanonicalConfigJson(config) + "\n";
    return std::vector<std::uint8_t>(text.begin(), text.end());
  }());

  const std::string manifest_path = (rootp / "manifest.jsonl").string();
  std::ofstream manifest(manifest_path, std::ios::binary);
  if (!manifest) throw std::runtime_error("stream: cannot open " + manifest_path);

  const SeedPath root(g.seed);
  WorldWindow window(&config.schedule, root, g.window_tiles);
  DynamicsConfig dyn;
  dyn.cruise_speed = g.cruise_speed;
  {
    RandomSource cam_src = DeriveSource(root.Child("camera"));
    dyn.camera_entry = SampleCategorical(
        cam_src, window.StateOf(0).entry_weights[static_cast<int>(ObjectCategory::Vehicle)]);
  }
  TrafficSim sim(dyn);
  RendererOptions ropt;
  ropt.threads = std::max(1, options.threads);
  ropt.modes = g.modes;
  Renderer renderer(IntrinsicsOf(g), ropt);

  // Simulation subticks at a fixed nominal 120 Hz, locked to whole frames so
  // capture instants land exactly on simulation states.
  const int sim_steps = std::max(1, static_cast<int>(std::lround(120.0 / g.fps)));
  const double dt = 1.0 / (g.fps * sim_steps);

  {
    njson h;
    h["type"] = "header";
    h["seed"] = g.seed;
    h["config_hash"] = ConfigHash(config);
    h["preset"] = config.preset;
    h["width"] = g.width;
    h["height"] = g.height;
    h["fps"] = g.fps;
    h["capture_stride"] = g.capture_stride;
    h["window_tiles"] = g.window_tiles;
    h["subsequences"] = config.schedule.size();
    h["total_tiles"] = window.TotalScheduledTiles();
    h["transform"] = TransformName(options.transform);
    manifest << h.dump() << "\n";
  }

  StreamResult res;
  const ExtractionRules rules;
  FrameSet frame;
  FrameSet prev_captured;
  bool have_prev = false;
  long rendered = 0;

  for (long i = 0;; ++i) {
    if (options.max_frames > 0 && i >= options.max_frames) break;
    double local_s = 0;
    const TileInstance* cam_tile = window.TileContaining(sim.Camera().arc, &local_s);
    const int camera_tile = cam_tile ? cam_tile->index : 0;
    if (camera_tile >= window.TotalScheduledTiles()) break;
    res.frames_total = i + 1;

    const bool captured = i % g.capture_stride == 0;
    if (captured || options.emit_frames) {
      const WorldState& state = window.StateOf(window.SubseqOfTile(camera_tile)).world;
      const Clock::time_point r0 = Clock::now();
      renderer.RenderFrame(window, sim, state, root.Child("frame", static_cast<std::uint64_t>(i)),
                           frame);
      res.render_seconds += SecondsSince(r0);
      ++rendered;
      frame.meta.stream_time = static_cast<double>(i) / g.fps;
      frame.meta.frame_index = static_cast<int>(i);
      frame.meta.subseq = window.SubseqOfTile(frame.meta.camera_tile);

      njson rec;
      rec["type"] = "frame";
      rec["frame"] = i;
      rec["t"] = frame.meta.subseq;
      rec["camera_tile"] = frame.meta.camera_tile;
      rec["stream_time"] = frame.meta.stream_time;
      rec["captured"] = captured;
      rec["world"] = WorldJson(state);

      if (options.emit_frames) {
        njson paths = njson::object();
        const std::string name = FrameFileName(frame.meta.subseq, i);
        if (g.modes.color) paths["color"] = "color/" + name;
        if (g.modes.semantic) paths["semantic"] = "semantic/" + name;
        if (g.modes.depth) paths["depth"] = "depth/" + name;
        if (g.modes.normal) paths["normal"] = "normal/" + name;
        WriteFrameSet(frame, g.modes, output_root);
        rec["paths"] = std::move(paths);
        ++res.frames_written;
      }

      std::vector<PatchRecord> patches;
      bool duplicate = false;
      if (captured) {
        ++res.frames_captured;
        duplicate = g.modes.color && have_prev && IsDuplicateFrame(frame, prev_captured);
        rec["duplicate"] = duplicate;
        if (duplicate) ++res.duplicates_skipped;
        if (g.modes.semantic) {
          njson boxes = njson::array();
          for (const BoundingBox& b : BoxesFromMask(frame.semantic, frame.instance)) {
            boxes.push_back(BoxJson(b));
          }
          rec["boxes"] = std::move(boxes);
        }
        if (options.observer) options.observer(frame, duplicate);
        if (options.emit_patches && !duplicate) {
          RandomSource esrc = DeriveSource(
              root.Child("frame", static_cast<std::uint64_t>(i)).Child("extract"));
          ExtractionCounters fc;
          patches = ExtractPatches(frame, rules, esrc, &fc);
          res.extraction.boxes_total += fc.boxes_total;
          res.extraction.dropped_small += fc.dropped_small;
          res.extraction.dropped_overlap += fc.dropped_overlap;
          res.extraction.bg_slots_skipped += fc.bg_slots_skipped;
          res.extraction.emitted += fc.emitted;
          rec["drops"] = {{"small", fc.dropped_small},
                          {"overlap", fc.dropped_overlap},
                          {"bg_skipped", fc.bg_slots_skipped}};
        }
      }
      manifest << rec.dump() << "\n";

      for (std::size_t k = 0; k < patches.size(); ++k) {
        const PatchRecord& p = patches[k];
        char buf[64];
        std::snprintf(buf, sizeof buf, "%02d_%06ld_%02zu_c%d.png", frame.meta.subseq, i, k,
                      static_cast<int>(p.label));
        const std::string rel = std::string("patches/") + buf;
        WriteFileBytes(output_root + "/" + rel, EncodePngRgb8(p.image));
        ++res.patches_written;

        njson prec;
        prec["type"] = "patch";
        prec["frame"] = i;
        prec["t"] = frame.meta.subseq;
        prec["label"] = p.label;
        prec["path"] = rel;
        prec["box"] = BoxJson(p.box);
        prec["crop"] = {{"x", p.crop_x}, {"y", p.crop_y}, {"side", p.crop_side}};
        if (options.transform != PatchTransform::None) {
          const std::string suffix =
              options.transform == PatchTransform::ColorRatio ? "_ratio.png" : "_lbp.png";
          std::string trel = rel;
          trel.replace(trel.size() - 4, 4, suffix);
          if (options.transform == PatchTransform::ColorRatio) {
            WriteFileBytes(output_root + "/" + trel, EncodePngRgb8(RatioBytes(ColorRatios(p.image))));
          } else {
            const ImageF gray = LuminancePlane(p.image);
            WriteFileBytes(output_root + "/" + trel,
                           EncodePngGray8(LbpBytes(LbpCodes(gray), gray.width, gray.height)));
          }
          prec["transform"] = TransformName(options.transform);
          prec["transform_path"] = trel;
        }
        manifest << prec.dump() << "\n";
      }

      if (captured) {
        std::swap(prev_captured, frame);
        have_prev = true;
      }
    }

    for (int s = 0; s < sim_steps; ++s) sim.Step(window, dt);
  }

  {
    njson s;
    s["type"] = "summary";
    s["frames"] = res.frames_total;
    s["captured"] = res.frames_captured;
    s["frames_written"] = res.frames_written;
    s["patches"] = res.patches_written;
    s["duplicates_skipped"] = res.duplicates_skipped;
    s["drops"] = {{"boxes_total", res.extraction.boxes_total},
                  {"small", res.extraction.dropped_small},
                  {"overlap", res.extraction.dropped_overlap},
                  {"bg_skipped", res.extraction.bg_slots_skipped},
                  {"emitted", res.extraction.emitted}};
    manifest << s.dump() << "\n";
  }
  manifest.flush();
  if (!manifest) throw std::runtime_error("stream: write failed for " + manifest_path);

  res.total_seconds = SecondsSince(t_start);
  res.manifest_path = manifest_path;

  if (!options.timing_path.empty()) {
    njson t;
    t["total_seconds"] = res.total_seconds;
    t["render_seconds"] = res.render_seconds;
    t["frames_total"] = res.frames_total;
    t["frames_rendered"] = rendered;
    t["render_fps"] = res.render_seconds > 0 ? rendered / res.render_seconds : 0.0;
    t["threads"] = std::max(1, options.threads);
    std::ofstream tf(options.timing_path, std::ios::binary);
    if (!tf) throw std::runtime_error("stream: cannot open " + options.timing_path);
    tf << t.dump(2) << "\n";
  }
  return res;
}

}  // namespace urbangen
