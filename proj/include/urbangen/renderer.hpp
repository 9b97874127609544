#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "urbangen/dynamics.hpp"
#include "urbangen/geometry.hpp"
#include "urbangen/image.hpp"
#include "urbangen/model.hpp"
#include "urbangen/random.hpp"
#include "urbangen/tiles.hpp"

namespace urbangen {

struct CameraIntrinsics {
  int width = 960;
  int height = 540;
  double fps = 30.0;
  double fov_horizontal = 1.5707963267948966;  // 90 degrees
  double shutter_seconds = 1.0;
  double iso = 100.0;
  double aperture = 1.0;
  double near_clip = 0.3;
  double far_clip = 300.0;
};

struct MaterialParams {
  Vec3 base_color{0.5, 0.5, 0.5};  // linear albedo, each channel in [0,1]
  double metallicity = 0.0;
  double roughness = 0.8;
  bool has_normal_detail = false;
};

// Semantic label codes written to the label buffer. Buildings share the
// background/street code: they belong to the always-present backdrop.
constexpr std::uint8_t kLabelBackground = 0;
constexpr std::uint8_t kLabelTree = 1;
constexpr std::uint8_t kLabelLamp = 2;
constexpr std::uint8_t kLabelHuman = 3;
constexpr std::uint8_t kLabelVehicle = 4;
constexpr std::uint8_t kLabelSky = 255;

std::uint8_t SemanticLabel(ObjectCategory c);

// Depth buffer encoding: linear meters at a fixed scale, sky at the sentinel.
constexpr double kDepthUnitsPerMeter = 200.0;
constexpr std::uint16_t kDepthSky = 65535;

// Instance ids are stream-stable per placed entity; 0 marks "no instance"
// (ground, street, sky).
constexpr std::uint16_t kNoInstance = 0;

struct InstanceInfo {
  ObjectCategory category = ObjectCategory::Building;
  int tile_index = -1;  // -1 for free-driving vehicles
  int subseq = 0;       // sub-sequence that spawned the entity
};

struct FrameMeta {
  double stream_time = 0;
  int frame_index = 0;
  int subseq = 0;
  int camera_tile = 0;
  WorldState world;
};

// The four aligned render modes plus the instance-id plane used by patch
// extraction. Every plane comes from one rasterization of one scene snapshot.
struct FrameSet {
  int width = 0;
  int height = 0;
  ImageU8 color;     // 3-channel
  ImageU8 semantic;  // 1-channel label codes
  ImageU16 depth;
  ImageU8 normal;    // 3-channel, unit vector mapped to [0,255]
  std::vector<std::uint16_t> instance;
  std::unordered_map<std::uint16_t, InstanceInfo> instance_info;
  FrameMeta meta;
};

struct LightContext {
  Vec3 sun_dir{0, 0, 1};    // unit, world frame (z up)
  Vec3 sun_tint{1, 1, 1};   // warms at low elevation; neutral when color is off
  double sun_scale = 1.0;   // overcast dims the sun
  double ambient_scale = 1.0;
  double intensity_lux = 76.8;
};

// Sun direction and tints derived from daytime hours and the weather state.
LightContext MakeLightContext(const WorldState& state);

// Per-surface linear shading: Lambert diffuse, optional Blinn-Phong lobe, and
// a small ambient floor, all scaled by the light intensity. `jitter` is the
// deterministic perturbation direction applied when normal detail is active.
Vec3 ShadePixel(const MaterialParams& material, Vec3 normal, Vec3 jitter, Vec3 view_dir,
                const LightContext& light, const RenderToggles& toggles);

// Display mapping factor K: clamp(linear * K) fills the 8-bit range. With the
// default exposure triplet a full-sun white diffuse surface clips at 76.8 Lux
// but stays below clipping at 19.2 Lux.
double ExposureScale(const CameraIntrinsics& intrinsics);

std::uint8_t ExposeChannel(double linear, double scale);

// Depth-driven blend toward fog gray, applied to display bytes. depth_m holds
// per-pixel meters (sky rows use the far clip).
void ApplyFog(ImageU8& color, const std::vector<float>& depth_m, double density,
              bool monochrome);

// Per-plane enable switches. Disabled planes stay allocated but zero-filled,
// and their per-pixel work is skipped (the instance plane follows semantic).
struct RenderModes {
  bool color = true;
  bool semantic = true;
  bool depth = true;
  bool normal = true;
};

struct RendererOptions {
  int threads = 1;
  RenderModes modes;
};

// Calibration probe: pushes one world-frame axis-aligned box through the same
// camera model, clipping and coverage rules as the full renderer and writes
// 255 to every covered pixel of `mask` (resized to the intrinsics). Lets
// closed-form projections be checked without assembling a world.
void RasterizeBoxCoverage(const CameraIntrinsics& intrinsics, const Pose2& camera_pose,
                          double camera_height, Vec3 center, Vec3 half_extents, ImageU8& mask);

class Renderer {
 public:
  Renderer(const CameraIntrinsics& intrinsics, const RendererOptions& options);
  ~Renderer();
  Renderer(const Renderer&) = delete;
  Renderer& operator=(const Renderer&) = delete;

  // Rasterizes the active window plus traffic into all planes of `out`.
  // frame_path seeds the per-frame weather overlay; meta fields other than
  // world/camera_tile are the caller's to fill. Output bytes are independent
  // of the thread count.
  void RenderFrame(WorldWindow& window, const TrafficSim& sim, const WorldState& state,
                   const SeedPath& frame_path, FrameSet& out);

  const CameraIntrinsics& Intrinsics() const;
  void SetThreads(int threads);
  void SetModes(const RenderModes& modes);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace urbangen
