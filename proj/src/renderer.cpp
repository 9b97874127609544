#include "urbangen/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace urbangen {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Layered ground planes: millimeter offsets resolve draw order through the
// depth buffer. The largest offset bounds the deviation from the ideal z = 0
// plane at 0.005 / 1.5 = 0.33% of depth, inside the 0.5% budget that the
// analytic ground-depth checks allow for.
constexpr double kZFarGround = -0.003;
constexpr double kZTerrain = -0.001;
constexpr double kZStreet = 0.0015;
constexpr double kZMarking = 0.0025;
constexpr double kZSidewalk = 0.004;
constexpr double kZDecal = 0.005;

constexpr double kFogPerMeter = 0.05;  // extinction at density 1
constexpr double kAmbientFloor = 0.02;
constexpr double kSpecularCap = 0.35;
constexpr double kEmissiveFloorLux = 24.0;  // lamp heads keep glowing at night

constexpr std::uint32_t kNoTri = 0xffffffffu;

double Clamp01(double v) { return v < 0 ? 0 : (v > 1 ? 1 : v); }

double Luminance(Vec3 c) { return 0.299 * c.x + 0.587 * c.y + 0.114 * c.z; }

Vec3 Gray(double v) { return Vec3{v, v, v}; }

Vec3 Lerp(Vec3 a, Vec3 b, double t) { return a + (b - a) * t; }

Vec3 MulC(Vec3 a, Vec3 b) { return Vec3{a.x * b.x, a.y * b.y, a.z * b.z}; }

// ---------------------------------------------------------------------------
// Scene geometry

struct SceneTri {
  Vec3 a, b, c;
  Vec3 normal;      // unit, outward
  Vec3 albedo;
  double metallicity = 0;
  double roughness = 0.9;
  bool normal_detail = false;
  bool emissive = false;
  Vec3 jitter;      // fixed perturbation direction for detail shading
  Vec3 emissive_color;
  std::uint8_t label = kLabelBackground;
  std::uint16_t instance = kNoInstance;
};

struct DecalTri {
  Vec3 a, b, c;
  std::uint8_t factor = 128;  // shade multiplier, 128 = 1.0
};

struct Surface {
  Vec3 albedo;
  double metallicity = 0;
  double roughness = 0.9;
  bool normal_detail = false;
};

// Emits triangles for one entity: takes local-frame coordinates, applies the
// entity pose, and stamps label/instance/material onto every triangle. The
// per-entity triangle counter keeps detail jitter stable across rebuilds.
class MeshWriter {
 public:
  explicit MeshWriter(std::vector<SceneTri>* out) : out_(out) {}

  void Begin(const Pose2& pose, std::uint8_t label, std::uint16_t instance,
             std::uint64_t jitter_key)
  {
    pose_ = pose;
    cos_h_ = std::cos(pose.heading);
    sin_h_ = std::sin(pose.heading);
    label_ = label;
    instance_ = instance;
    jitter_key_ = jitter_key;
    counter_ = 0;
  }

  void SetSurface(const Surface& s)
  {
    surface_ = s;
    emissive_ = false;
  }

  void SetEmissive(Vec3 color)
  {
    emissive_ = true;
    emissive_color_ = color;
  }

  void Tri(Vec3 a, Vec3 b, Vec3 c)
  {
    SceneTri t;
    t.a = ToWorld(a);
    t.b = ToWorld(b);
    t.c = ToWorld(c);
    const Vec3 n = Cross(t.b - t.a, t.c - t.a);
    const double len = Length(n);
    if (len < 1e-12) return;
    t.normal = n * (1.0 / len);
    t.albedo = surface_.albedo;
    t.metallicity = surface_.metallicity;
    t.roughness = surface_.roughness;
    t.normal_detail = surface_.normal_detail;
    t.emissive = emissive_;
    t.emissive_color = emissive_color_;
    t.label = label_;
    t.instance = instance_;
    const std::uint64_t h = Mix64(jitter_key_ + kGolden64 * (counter_ + 1));
    t.jitter = Vec3{(static_cast<double>(h & 0xffff) / 65535.0 * 2.0 - 1.0) * 0.22,
                    (static_cast<double>((h >> 16) & 0xffff) / 65535.0 * 2.0 - 1.0) * 0.22,
                    (static_cast<double>((h >> 32) & 0xffff) / 65535.0 * 2.0 - 1.0) * 0.22};
    ++counter_;
    out_->push_back(t);
  }

  // Corners wound so that Cross(b - a, c - a) points outward.
  void Quad(Vec3 a, Vec3 b, Vec3 c, Vec3 d)
  {
    Tri(a, b, c);
    Tri(a, c, d);
  }

  // Axis-aligned quad in the local ground plane, normal up.
  void QuadUp(double x0, double y0, double x1, double y1, double z)
  {
    Quad(Vec3{x0, y0, z}, Vec3{x1, y0, z}, Vec3{x1, y1, z}, Vec3{x0, y1, z});
  }

  void Box(Vec3 center, Vec3 half)
  {
    const double x0 = center.x - half.x, x1 = center.x + half.x;
    const double y0 = center.y - half.y, y1 = center.y + half.y;
    const double z0 = center.z - half.z, z1 = center.z + half.z;
    Quad(Vec3{x0, y0, z1}, Vec3{x1, y0, z1}, Vec3{x1, y1, z1}, Vec3{x0, y1, z1});  // top
    Quad(Vec3{x0, y0, z0}, Vec3{x0, y1, z0}, Vec3{x1, y1, z0}, Vec3{x1, y0, z0});  // bottom
    Quad(Vec3{x1, y0, z0}, Vec3{x1, y1, z0}, Vec3{x1, y1, z1}, Vec3{x1, y0, z1});  // +x
    Quad(Vec3{x0, y0, z0}, Vec3{x0, y0, z1}, Vec3{x0, y1, z1}, Vec3{x0, y1, z0});  // -x
    Quad(Vec3{x0, y1, z0}, Vec3{x0, y1, z1}, Vec3{x1, y1, z1}, Vec3{x1, y1, z0});  // +y
    Quad(Vec3{x0, y0, z0}, Vec3{x1, y0, z0}, Vec3{x1, y0, z1}, Vec3{x0, y0, z1});  // -y
  }

  void VerticalCylinder(Vec2 center, double z0, double z1, double r, int sides, bool cap_top)
  {
    for (int i = 0; i < sides; ++i) {
      const double a0 = 2.0 * kPi * i / sides;
      const double a1 = 2.0 * kPi * (i + 1) / sides;
      const Vec2 p0{center.x + r * std::cos(a0), center.y + r * std::sin(a0)};
      const Vec2 p1{center.x + r * std::cos(a1), center.y + r * std::sin(a1)};
      Quad(Vec3{p0.x, p0.y, z0}, Vec3{p1.x, p1.y, z0}, Vec3{p1.x, p1.y, z1},
           Vec3{p0.x, p0.y, z1});
      if (cap_top) {
        Tri(Vec3{center.x, center.y, z1}, Vec3{p0.x, p0.y, z1}, Vec3{p1.x, p1.y, z1});
      }
    }
  }

  void Cone(Vec2 center, double z0, double z1, double r, int sides)
  {
    for (int i = 0; i < sides; ++i) {
      const double a0 = 2.0 * kPi * i / sides;
      const double a1 = 2.0 * kPi * (i + 1) / sides;
      const Vec3 p0{center.x + r * std::cos(a0), center.y + r * std::sin(a0), z0};
      const Vec3 p1{center.x + r * std::cos(a1), center.y + r * std::sin(a1), z0};
      Tri(p0, p1, Vec3{center.x, center.y, z1});
      Tri(p1, p0, Vec3{center.x, center.y, z0});  // base, facing down
    }
  }

  // Octahedral sphere: eight faces around an equator square.
  void OctaSphere(Vec3 center, double r)
  {
    const Vec3 top = center + Vec3{0, 0, r};
    const Vec3 bot = center - Vec3{0, 0, r};
    Vec3 eq[4] = {center + Vec3{r, 0, 0}, center + Vec3{0, r, 0}, center + Vec3{-r, 0, 0},
                  center + Vec3{0, -r, 0}};
    for (int i = 0; i < 4; ++i) {
      const Vec3& p0 = eq[i];
      const Vec3& p1 = eq[(i + 1) % 4];
      Tri(p0, p1, top);
      Tri(p1, p0, bot);
    }
  }

 private:
  Vec3 ToWorld(Vec3 local) const
  {
    return Vec3{pose_.x + cos_h_ * local.x - sin_h_ * local.y,
                pose_.y + sin_h_ * local.x + cos_h_ * local.y, local.z};
  }

  std::vector<SceneTri>* out_;
  Pose2 pose_;
  double cos_h_ = 1, sin_h_ = 0;
  Surface surface_;
  bool emissive_ = false;
  Vec3 emissive_color_;
  std::uint8_t label_ = kLabelBackground;
  std::uint16_t instance_ = kNoInstance;
  std::uint64_t jitter_key_ = 0;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Ground palette and weather baking

const Surface kAsphalt{Vec3{0.135, 0.135, 0.145}, 0.0, 0.92, false};
const Surface kMarkingPaint{Vec3{0.78, 0.78, 0.74}, 0.0, 0.85, false};
const Surface kSidewalkSlab{Vec3{0.46, 0.45, 0.43}, 0.0, 0.90, false};
const Surface kTerrainGrass{Vec3{0.30, 0.36, 0.26}, 0.0, 0.95, false};

struct GroundBake {
  Surface street = kAsphalt;
  Surface marking = kMarkingPaint;
  Surface sidewalk = kSidewalkSlab;
  Surface terrain = kTerrainGrass;
};

// The owning sub-sequence's weather recolors ground surfaces once per tile:
// snow cover whitens, rain wets and darkens. Geometry never changes.
GroundBake BakeGround(const WeatherState& w)
{
  GroundBake g;
  if (w.kind == WeatherKind::Snow) {
    const double gd = Clamp01(w.ground_density);
    const Vec3 snow{0.85, 0.87, 0.92};
    g.terrain.albedo = Lerp(g.terrain.albedo, snow, 0.85 * gd);
    g.sidewalk.albedo = Lerp(g.sidewalk.albedo, snow, 0.80 * gd);
    g.street.albedo = Lerp(g.street.albedo, snow, 0.45 * gd);
    g.marking.albedo = Lerp(g.marking.albedo, snow, 0.30 * gd);
  } else if (w.kind == WeatherKind::Rain) {
    const double gd = Clamp01(w.ground_density);
    g.street.albedo = g.street.albedo * (1.0 - 0.30 * gd);
    g.street.roughness = 0.6;
    g.sidewalk.albedo = g.sidewalk.albedo * (1.0 - 0.20 * gd);
    g.terrain.albedo = g.terrain.albedo * (1.0 - 0.15 * gd);
    g.marking.albedo = g.marking.albedo * (1.0 - 0.25 * gd);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Street-level meshes per layout

// Quad strip of constant lateral extent [l0, l1] following the tile track.
void TrackStrip(MeshWriter& w, const TileLayout& layout, double l0, double l1, double z,
                int segments)
{
  for (int i = 0; i < segments; ++i) {
    const double s0 = layout.track_length * i / segments;
    const double s1 = layout.track_length * (i + 1) / segments;
    const Pose2 p0 = LayoutTrackPose(layout, s0);
    const Pose2 p1 = LayoutTrackPose(layout, s1);
    const Vec2 n0 = Left(p0);
    const Vec2 n1 = Left(p1);
    w.Quad(Vec3{p0.x + n0.x * l0, p0.y + n0.y * l0, z}, Vec3{p1.x + n1.x * l0, p1.y + n1.y * l0, z},
           Vec3{p1.x + n1.x * l1, p1.y + n1.y * l1, z},
           Vec3{p0.x + n0.x * l1, p0.y + n0.y * l1, z});
  }
}

void TrackDash(MeshWriter& w, const TileLayout& layout, double s0, double s1, double z)
{
  const Pose2 p0 = LayoutTrackPose(layout, s0);
  const Pose2 p1 = LayoutTrackPose(layout, s1);
  const Vec2 n0 = Left(p0);
  const Vec2 n1 = Left(p1);
  const double hw = 0.12;
  w.Quad(Vec3{p0.x - n0.x * hw, p0.y - n0.y * hw, z}, Vec3{p1.x - n1.x * hw, p1.y - n1.y * hw, z},
         Vec3{p1.x + n1.x * hw, p1.y + n1.y * hw, z}, Vec3{p0.x + n0.x * hw, p0.y + n0.y * hw, z});
}

void BuildStreetSurfaces(MeshWriter& w, const TileLayout& layout, const GroundBake& bake)
{
  const bool curved = layout.family == LayoutFamily::Curve;
  const int segs = curved ? 12 : 1;
  const bool left_open =
      layout.kind == TileLayoutKind::CrossingTLeft || layout.kind == TileLayoutKind::CrossingX;
  const bool right_open =
      layout.kind == TileLayoutKind::CrossingTRight || layout.kind == TileLayoutKind::CrossingX;

  w.SetSurface(bake.terrain);
  w.QuadUp(0, -kTileSize / 2, kTileSize, kTileSize / 2, kZTerrain);

  w.SetSurface(bake.street);
  TrackStrip(w, layout, -kStreetHalfWidth, kStreetHalfWidth, kZStreet, segs);
  if (left_open) w.QuadUp(10, 5, 20, 15, kZStreet);
  if (right_open) w.QuadUp(10, -15, 20, -5, kZStreet);

  w.SetSurface(bake.marking);
  for (double s = 1.0; s + 2.0 <= layout.track_length; s += 4.0) {
    // Crossings keep the junction box unmarked.
    if ((left_open || right_open) && !(s + 2.0 <= 10.0 || s >= 20.0)) continue;
    TrackDash(w, layout, s, s + 2.0, kZMarking);
  }
  if (left_open) {
    w.QuadUp(14.88, 6, 15.12, 8, kZMarking);
    w.QuadUp(14.88, 10, 15.12, 12, kZMarking);
  }
  if (right_open) {
    w.QuadUp(14.88, -8, 15.12, -6, kZMarking);
    w.QuadUp(14.88, -12, 15.12, -10, kZMarking);
  }

  w.SetSurface(bake.sidewalk);
  const double sw0 = kStreetHalfWidth;
  const double sw1 = kStreetHalfWidth + kSidewalkWidth;
  if (left_open) {
    w.QuadUp(0, sw0, 7, sw1, kZSidewalk);
    w.QuadUp(23, sw0, 30, sw1, kZSidewalk);
    w.QuadUp(7, sw0, 10, 15, kZSidewalk);
    w.QuadUp(20, sw0, 23, 15, kZSidewalk);
  } else {
    TrackStrip(w, layout, sw0, sw1, kZSidewalk, segs);
  }
  if (right_open) {
    w.QuadUp(0, -sw1, 7, -sw0, kZSidewalk);
    w.QuadUp(23, -sw1, 30, -sw0, kZSidewalk);
    w.QuadUp(7, -15, 10, -sw0, kZSidewalk);
    w.QuadUp(20, -15, 23, -sw0, kZSidewalk);
  } else {
    TrackStrip(w, layout, -sw1, -sw0, kZSidewalk, segs);
  }
}

// ---------------------------------------------------------------------------
// Entity meshes

const Vec3 kBuildingPalette[10] = {
    {0.45, 0.27, 0.22}, {0.62, 0.56, 0.46}, {0.52, 0.52, 0.50}, {0.66, 0.58, 0.42},
    {0.50, 0.30, 0.26}, {0.42, 0.46, 0.52}, {0.48, 0.48, 0.36}, {0.70, 0.66, 0.56},
    {0.38, 0.40, 0.44}, {0.58, 0.48, 0.36}};

const Vec3 kShirtPalette[10] = {
    {0.55, 0.16, 0.16}, {0.16, 0.26, 0.50}, {0.20, 0.42, 0.24}, {0.62, 0.54, 0.20},
    {0.42, 0.22, 0.46}, {0.70, 0.70, 0.72}, {0.15, 0.15, 0.17}, {0.60, 0.36, 0.16},
    {0.22, 0.46, 0.48}, {0.48, 0.48, 0.50}};

const Vec3 kSkinPalette[4] = {
    {0.82, 0.64, 0.50}, {0.66, 0.48, 0.36}, {0.50, 0.36, 0.27}, {0.88, 0.72, 0.60}};

Vec3 VehiclePaint(const std::string& entry_id)
{
  const std::size_t us = entry_id.rfind('_');
  const std::string color = us == std::string::npos ? "" : entry_id.substr(us + 1);
  if (color == "red") return Vec3{0.60, 0.10, 0.10};
  if (color == "blue") return Vec3{0.12, 0.20, 0.55};
  if (color == "white") return Vec3{0.85, 0.85, 0.86};
  if (color == "yellow") return Vec3{0.80, 0.64, 0.12};
  if (color == "green") return Vec3{0.12, 0.40, 0.18};
  if (color == "black") return Vec3{0.05, 0.05, 0.06};
  return Vec3{0.62, 0.63, 0.66};  // silver
}

void BuildBuilding(MeshWriter& w, const std::string& entry_id)
{
  const std::uint64_t h = HashString(entry_id);
  const Vec3 wall = kBuildingPalette[h % 10];
  const double height = 8.0 + static_cast<double>((h >> 8) % 13);
  const double half = 5.0;

  Surface facade{wall, 0.0, 0.85, true};
  w.SetSurface(facade);
  const double z0 = -0.02;
  const double x0 = -half, x1 = half, y0 = -half, y1 = half;
  w.Quad(Vec3{x1, y0, z0}, Vec3{x1, y1, z0}, Vec3{x1, y1, height}, Vec3{x1, y0, height});
  w.Quad(Vec3{x0, y0, z0}, Vec3{x0, y0, height}, Vec3{x0, y1, height}, Vec3{x0, y1, z0});
  w.Quad(Vec3{x0, y1, z0}, Vec3{x0, y1, height}, Vec3{x1, y1, height}, Vec3{x1, y1, z0});
  w.Quad(Vec3{x0, y0, z0}, Vec3{x1, y0, z0}, Vec3{x1, y0, height}, Vec3{x0, y0, height});

  Surface roof{wall * 0.45, 0.0, 0.9, false};
  w.SetSurface(roof);
  w.Quad(Vec3{x0, y0, height}, Vec3{x1, y0, height}, Vec3{x1, y1, height}, Vec3{x0, y1, height});

  // Darker strips every storey read as window rows.
  Surface band{wall * 0.50, 0.0, 0.6, false};
  w.SetSurface(band);
  const double inset = half - 0.4;
  for (double zf = 3.0; zf + 1.0 < height; zf += 3.0) {
    const double zt = zf + 0.45;
    const double off = half + 0.012;
    w.Quad(Vec3{off, -inset, zf}, Vec3{off, inset, zf}, Vec3{off, inset, zt},
           Vec3{off, -inset, zt});
    w.Quad(Vec3{-off, inset, zf}, Vec3{-off, -inset, zf}, Vec3{-off, -inset, zt},
           Vec3{-off, inset, zt});
    w.Quad(Vec3{inset, off, zf}, Vec3{-inset, off, zf}, Vec3{-inset, off, zt},
           Vec3{inset, off, zt});
    w.Quad(Vec3{-inset, -off, zf}, Vec3{inset, -off, zf}, Vec3{inset, -off, zt},
           Vec3{-inset, -off, zt});
  }
}

void BuildTree(MeshWriter& w, const std::string& entry_id)
{
  const std::uint64_t h = HashString(entry_id);
  const double scale = 0.85 + 0.3 * static_cast<double>(h % 100) / 100.0;

  Surface trunk{Vec3{0.32, 0.24, 0.16}, 0.0, 0.9, false};
  w.SetSurface(trunk);
  const bool pine = entry_id.find("pine") != std::string::npos;
  const bool oak = entry_id.find("oak") != std::string::npos;
  const double trunk_h = (pine ? 1.4 : 2.2) * scale;
  w.VerticalCylinder(Vec2{0, 0}, 0.0, trunk_h, 0.16 * scale, 6, false);

  Surface leaves{pine ? Vec3{0.16, 0.33, 0.22} : (oak ? Vec3{0.25, 0.42, 0.18}
                                                      : Vec3{0.45, 0.62, 0.30}),
                 0.0, 0.95, true};
  w.SetSurface(leaves);
  // Crowns stay narrow so street furniture beside a tree keeps a clear
  // silhouette of its own.
  if (pine) {
    double z = trunk_h;
    double r = 0.95 * scale;
    for (int tier = 0; tier < 3; ++tier) {
      w.Cone(Vec2{0, 0}, z, z + 1.7 * scale, r, 8);
      z += 1.0 * scale;
      r *= 0.72;
    }
  } else if (oak) {
    w.Cone(Vec2{0, 0}, trunk_h, trunk_h + 2.6 * scale, 1.05 * scale, 8);
    w.Cone(Vec2{0, 0}, trunk_h + 1.4 * scale, trunk_h + 3.4 * scale, 0.7 * scale, 8);
  } else {
    w.Cone(Vec2{0, 0}, trunk_h, trunk_h + 3.6 * scale, 0.8 * scale, 8);
  }
}

void BuildLamp(MeshWriter& w)
{
  Surface metal{Vec3{0.18, 0.19, 0.20}, 0.7, 0.35, false};
  w.SetSurface(metal);
  w.VerticalCylinder(Vec2{0, 0}, 0.0, 4.2, 0.07, 6, true);
  w.Box(Vec3{1.1, 0, 4.2}, Vec3{1.1, 0.05, 0.05});
  w.SetEmissive(Vec3{0.9, 0.85, 0.7});
  w.Box(Vec3{2.1, 0, 4.06}, Vec3{0.28, 0.12, 0.1});
}

void BuildHuman(MeshWriter& w, const PlacedEntity& e, const std::string& entry_id)
{
  const std::uint64_t h = HashString(entry_id);
  double scale = 1.0;
  if (entry_id.find("child") != std::string::npos) {
    scale = 0.62;
  } else if (entry_id.find("senior") != std::string::npos) {
    scale = 0.92;
  } else {
    scale = 0.94 + 0.12 * static_cast<double>(h % 100) / 100.0;
  }
  const bool walking = e.gait == Gait::Walk;
  const double cycle = std::sin(2.0 * kPi * e.walk_phase);
  const double bob = walking ? 0.06 * cycle : 0.0;
  const double stride = walking ? 0.14 * cycle : 0.0;  // legs scissor along the heading
  const double swing = walking ? 0.16 * cycle : 0.0;   // arms counter the legs

  Surface pants{Vec3{0.20, 0.20, 0.28}, 0.0, 0.9, false};
  w.SetSurface(pants);
  w.VerticalCylinder(Vec2{stride * scale, 0.10 * scale}, 0.0, 0.80 * scale, 0.08 * scale, 5,
                     false);
  w.VerticalCylinder(Vec2{-stride * scale, -0.10 * scale}, 0.0, 0.80 * scale, 0.08 * scale, 5,
                     false);

  // Shoulders plus arms span 0.74 * scale across the walking direction.
  Surface shirt{kShirtPalette[h % 10], 0.0, 0.9, false};
  w.SetSurface(shirt);
  w.VerticalCylinder(Vec2{0, 0}, (0.74 + bob) * scale, (1.38 + bob) * scale, 0.21 * scale, 6,
                     true);
  w.VerticalCylinder(Vec2{-swing * scale, 0.30 * scale}, (0.80 + bob) * scale,
                     (1.36 + bob) * scale, 0.07 * scale, 5, true);
  w.VerticalCylinder(Vec2{swing * scale, -0.30 * scale}, (0.80 + bob) * scale,
                     (1.36 + bob) * scale, 0.07 * scale, 5, true);

  Surface skin{kSkinPalette[(h >> 4) % 4], 0.0, 0.85, false};
  w.SetSurface(skin);
  w.OctaSphere(Vec3{0, 0, (1.50 + bob) * scale}, 0.13 * scale);
}

void BuildVehicle(MeshWriter& w, const std::string& entry_id)
{
  const bool van = entry_id.find("van") != std::string::npos;
  Surface paint{VehiclePaint(entry_id), 0.85, 0.30, false};
  Surface glass{Vec3{0.10, 0.12, 0.16}, 0.5, 0.15, false};
  Surface rubber{Vec3{0.06, 0.06, 0.07}, 0.0, 0.95, false};

  w.SetSurface(rubber);
  const double wx = van ? 1.45 : 1.30;
  for (int sx = -1; sx <= 1; sx += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      w.Box(Vec3{sx * wx, sy * 0.78, 0.30}, Vec3{0.32, 0.10, 0.30});
    }
  }

  w.SetSurface(paint);
  if (van) {
    w.Box(Vec3{-0.25, 0, 1.00}, Vec3{1.70, 0.90, 0.72});
    w.Box(Vec3{1.80, 0, 0.70}, Vec3{0.70, 0.86, 0.34});
    w.SetSurface(glass);
    w.Box(Vec3{1.45, 0, 1.30}, Vec3{0.12, 0.78, 0.24});
  } else {
    w.Box(Vec3{0, 0, 0.62}, Vec3{2.10, 0.85, 0.33});
    w.SetSurface(glass);
    w.Box(Vec3{-0.20, 0, 1.20}, Vec3{1.05, 0.76, 0.28});
  }
}

void DecalOctagon(std::vector<DecalTri>* out, const Pose2& pose, double rx, double ry, double z,
                  std::uint8_t factor)
{
  Vec2 center = Apply(pose, Vec2{0, 0});
  Vec2 pts[8];
  for (int i = 0; i < 8; ++i) {
    const double a = 2.0 * kPi * i / 8 + kPi / 8;
    pts[i] = Apply(pose, Vec2{rx * std::cos(a), ry * std::sin(a)});
  }
  for (int i = 0; i < 8; ++i) {
    const Vec2& p0 = pts[i];
    const Vec2& p1 = pts[(i + 1) % 8];
    out->push_back(DecalTri{Vec3{center.x, center.y, z}, Vec3{p0.x, p0.y, z},
                            Vec3{p1.x, p1.y, z}, factor});
  }
}

constexpr std::uint8_t kAoFactor = 77;      // 0.60 contact shadow
constexpr std::uint8_t kPuddleFactor = 173; // 1.35 gloss patch

// ---------------------------------------------------------------------------
// Camera model and rasterization

struct CamBasis {
  Vec3 eye, right, up, fwd;
  double fx = 0, cx = 0, cy = 0;
  double near_clip = 0.3, far_clip = 300.0;
  int width = 0, height = 0;
};

CamBasis MakeBasis(const CameraIntrinsics& intr, const Pose2& pose, double height)
{
  CamBasis cb;
  cb.eye = Vec3{pose.x, pose.y, height};
  cb.fwd = Vec3{std::cos(pose.heading), std::sin(pose.heading), 0};
  cb.right = Vec3{std::sin(pose.heading), -std::cos(pose.heading), 0};
  cb.up = Vec3{0, 0, 1};
  cb.fx = (intr.width / 2.0) / std::tan(intr.fov_horizontal / 2.0);
  cb.cx = intr.width / 2.0;
  cb.cy = intr.height / 2.0;
  cb.near_clip = intr.near_clip;
  cb.far_clip = intr.far_clip;
  cb.width = intr.width;
  cb.height = intr.height;
  return cb;
}

struct ProjTri {
  double ax, ay, bx, by, cx, cy;
  double iza, izb, izc;
  std::uint32_t src;
};

// Clips the camera-space triangle against z >= near and emits a fan of
// projected triangles. Vertices carry 1/z for screen-affine interpolation.
void ProjectClipped(const CamBasis& cb, Vec3 pa, Vec3 pb, Vec3 pc, std::uint32_t src,
                    std::vector<ProjTri>* out)
{
  Vec3 in[3] = {pa, pb, pc};
  Vec3 poly[7];
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& cur = in[i];
    const Vec3& nxt = in[(i + 1) % 3];
    const bool cur_in = cur.z >= cb.near_clip;
    const bool nxt_in = nxt.z >= cb.near_clip;
    if (cur_in) poly[n++] = cur;
    if (cur_in != nxt_in) {
      const double t = (cb.near_clip - cur.z) / (nxt.z - cur.z);
      poly[n++] = cur + (nxt - cur) * t;
    }
  }
  if (n < 3) return;

  double sx[7], sy[7], iz[7];
  for (int i = 0; i < n; ++i) {
    iz[i] = 1.0 / poly[i].z;
    sx[i] = cb.cx + cb.fx * poly[i].x * iz[i];
    sy[i] = cb.cy - cb.fx * poly[i].y * iz[i];
  }
  for (int i = 1; i + 1 < n; ++i) {
    ProjTri t;
    t.ax = sx[0];
    t.ay = sy[0];
    t.bx = sx[i];
    t.by = sy[i];
    t.cx = sx[i + 1];
    t.cy = sy[i + 1];
    t.iza = iz[0];
    t.izb = iz[i];
    t.izc = iz[i + 1];
    t.src = src;
    out->push_back(t);
  }
}

Vec3 ToCamera(const CamBasis& cb, Vec3 p)
{
  const Vec3 rel = p - cb.eye;
  return Vec3{Dot(cb.right, rel), Dot(cb.up, rel), Dot(cb.fwd, rel)};
}

// Scans one projected triangle over rows [y_begin, y_end). Edge values are
// evaluated absolutely at each row start so banding never changes results.
template <typename Fragment>
void RasterTri(const ProjTri& t, int width, int y_begin, int y_end, Fragment&& frag)
{
  double ax = t.ax, ay = t.ay, bx = t.bx, by = t.by, cx = t.cx, cy = t.cy;
  double iza = t.iza, izb = t.izb, izc = t.izc;
  double area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  if (std::abs(area2) < 1e-12) return;
  if (area2 < 0) {
    std::swap(bx, cx);
    std::swap(by, cy);
    std::swap(izb, izc);
    area2 = -area2;
  }
  const double inv_area = 1.0 / area2;

  const double min_x = std::min(ax, std::min(bx, cx));
  const double max_x = std::max(ax, std::max(bx, cx));
  const double min_y = std::min(ay, std::min(by, cy));
  const double max_y = std::max(ay, std::max(by, cy));
  const int px0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
  const int px1 = std::min(width - 1, static_cast<int>(std::floor(max_x - 0.5)));
  const int py0 = std::max(y_begin, static_cast<int>(std::ceil(min_y - 0.5)));
  const int py1 = std::min(y_end - 1, static_cast<int>(std::floor(max_y - 0.5)));
  if (px0 > px1 || py0 > py1) return;

  // Edge i is opposite vertex i; each value is twice the signed area of the
  // sub-triangle against that edge, so the three sum to area2 everywhere and
  // all are non-negative exactly inside.
  const double e0dx = -(cy - by), e1dx = -(ay - cy), e2dx = -(by - ay);
  for (int py = py0; py <= py1; ++py) {
    const double yc = py + 0.5;
    const double x0 = px0 + 0.5;
    double e0 = (cx - bx) * (yc - by) - (cy - by) * (x0 - bx);
    double e1 = (ax - cx) * (yc - cy) - (ay - cy) * (x0 - cx);
    double e2 = (bx - ax) * (yc - ay) - (by - ay) * (x0 - ax);
    for (int px = px0; px <= px1; ++px) {
      if (e0 >= 0 && e1 >= 0 && e2 >= 0) {
        const double w0 = e0 * inv_area;
        const double w1 = e1 * inv_area;
        const double w2 = e2 * inv_area;
        frag(px, py, w0 * iza + w1 * izb + w2 * izc);
      }
      e0 += e0dx;
      e1 += e1dx;
      e2 += e2dx;
    }
  }
}

template <typename Fn>
void ParallelBands(int height, int threads, Fn&& fn)
{
  threads = std::clamp(threads, 1, 16);
  if (threads > height) threads = height;
  if (threads <= 1) {
    fn(0, height);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int b = 0; b < threads; ++b) {
    const int y0 = height * b / threads;
    const int y1 = height * (b + 1) / threads;
    pool.emplace_back([&fn, y0, y1] { fn(y0, y1); });
  }
  for (std::thread& th : pool) th.join();
}

// Per-triangle shading record resolved once and shared by all its fragments.
struct ShadeRec {
  Vec3 linear;
  std::uint8_t nx = 128, ny = 128, nz = 128;
  std::uint8_t label = kLabelSky;
  std::uint16_t instance = kNoInstance;
};

std::uint8_t NormalByte(double v) { return static_cast<std::uint8_t>(std::lround((v * 0.5 + 0.5) * 255.0)); }

}  // namespace

// ---------------------------------------------------------------------------
// Public free functions

std::uint8_t SemanticLabel(ObjectCategory c)
{
  switch (c) {
  case ObjectCategory::Building: return kLabelBackground;
  case ObjectCategory::Tree: return kLabelTree;
  case ObjectCategory::Lamp: return kLabelLamp;
  case ObjectCategory::Human: return kLabelHuman;
  case ObjectCategory::Vehicle: return kLabelVehicle;
  }
  return kLabelBackground;
}

LightContext MakeLightContext(const WorldState& state)
{
  LightContext l;
  const double raw = kPi * (state.lighting.daytime_hours - 6.0) / 12.0;
  const double e = std::clamp(raw, 0.015, kPi - 0.015);
  const double az = 0.6;  // fixed world-frame azimuth; tiles rotate under it
  l.sun_dir = Vec3{std::cos(e) * std::cos(az), std::cos(e) * std::sin(az), std::sin(e)};
  const double altitude = std::min(e, kPi - e);
  const double warm = Clamp01(1.0 - altitude / (kPi / 12.0));
  l.sun_tint = Lerp(Vec3{1, 1, 1}, Vec3{1.0, 0.78, 0.55}, warm);
  if (state.weather.kind == WeatherKind::Overcast || state.weather.clouds_active) {
    l.sun_scale = 0.4;
    l.ambient_scale = 2.0;
  }
  l.intensity_lux = state.lighting.intensity_lux;
  return l;
}

Vec3 ShadePixel(const MaterialParams& material, Vec3 normal, Vec3 jitter, Vec3 view_dir,
                const LightContext& light, const RenderToggles& toggles)
{
  const Vec3 albedo =
      toggles.color ? material.base_color : Gray(Luminance(material.base_color));
  const Vec3 tint = toggles.color ? light.sun_tint : Gray(Luminance(light.sun_tint));
  Vec3 n = normal;
  if (toggles.normals && material.has_normal_detail) n = Normalized(normal + jitter);

  double ndl = Dot(n, light.sun_dir);
  if (ndl < 0) ndl = 0;
  double spec = 0;
  if (toggles.roughness && ndl > 0) {
    const Vec3 h = Normalized(light.sun_dir + view_dir);
    double ndh = Dot(n, h);
    if (ndh < 0) ndh = 0;
    const double exponent = 2.0 + (1.0 - material.roughness) * 126.0;
    const double strength = toggles.metallicity ? material.metallicity : 0.04;
    spec = std::min(kSpecularCap, strength * std::pow(ndh, exponent));
  }

  const Vec3 sun = MulC(albedo * ndl + Vec3{spec, spec, spec}, tint) * light.sun_scale;
  const Vec3 ambient = albedo * (kAmbientFloor * light.ambient_scale);
  return (sun + ambient) * light.intensity_lux;
}

double ExposureScale(const CameraIntrinsics& intrinsics)
{
  return (1.0 / 32.0) * intrinsics.shutter_seconds * (intrinsics.iso / 100.0) /
         (intrinsics.aperture * intrinsics.aperture);
}

std::uint8_t ExposeChannel(double linear, double scale)
{
  const double v = linear * scale;
  if (!(v > 0)) return 0;
  if (v >= 1) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

void ApplyFog(ImageU8& color, const std::vector<float>& depth_m, double density, bool monochrome)
{
  if (density <= 0) return;
  const Vec3 fog{0.72, 0.74, 0.78};
  double fr = fog.x * 255.0, fg = fog.y * 255.0, fb = fog.z * 255.0;
  if (monochrome) fr = fg = fb = Luminance(fog) * 255.0;
  const double k = density * kFogPerMeter;
  const std::size_t pixels = depth_m.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    const double f = 1.0 - std::exp(-k * static_cast<double>(depth_m[i]));
    std::uint8_t* px = &color.data[i * 3];
    px[0] = static_cast<std::uint8_t>(std::lround(px[0] + (fr - px[0]) * f));
    px[1] = static_cast<std::uint8_t>(std::lround(px[1] + (fg - px[1]) * f));
    px[2] = static_cast<std::uint8_t>(std::lround(px[2] + (fb - px[2]) * f));
  }
}

void RasterizeBoxCoverage(const CameraIntrinsics& intrinsics, const Pose2& camera_pose,
                          double camera_height, Vec3 center, Vec3 half_extents, ImageU8& mask)
{
  const CamBasis cb = MakeBasis(intrinsics, camera_pose, camera_height);
  std::vector<SceneTri> tris;
  MeshWriter w(&tris);
  w.Begin(Pose2{}, kLabelBackground, kNoInstance, 0);
  w.SetSurface(Surface{Vec3{1, 1, 1}, 0, 0.9, false});
  w.Box(center, half_extents);

  std::vector<ProjTri> proj;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const SceneTri& t = tris[i];
    if (Dot(t.normal, cb.eye - t.a) <= 1e-12) continue;
    ProjectClipped(cb, ToCamera(cb, t.a), ToCamera(cb, t.b), ToCamera(cb, t.c),
                   static_cast<std::uint32_t>(i), &proj);
  }

  mask = ImageU8(intrinsics.width, intrinsics.height, 1);
  const double inv_far = 1.0 / cb.far_clip;
  for (const ProjTri& t : proj) {
    RasterTri(t, cb.width, 0, cb.height, [&](int px, int py, double iz) {
      if (iz < inv_far) return;
      mask.At(px, py) = 255;
    });
  }
}

// ---------------------------------------------------------------------------
// Renderer

struct Renderer::Impl {
  struct TileCache {
    int subseq = 0;
    std::vector<SceneTri> static_tris;
    std::vector<DecalTri> static_decals;
    std::vector<std::uint16_t> entity_instance;  // parallel to tile.entities
  };

  CameraIntrinsics intr;
  RendererOptions opt;

  std::unordered_map<int, TileCache> tile_cache;
  std::unordered_map<int, std::uint16_t> vehicle_ids;
  std::unordered_map<std::uint16_t, InstanceInfo> registry;
  std::uint32_t next_instance = 1;

  // Frame scratch, reused across frames.
  std::vector<SceneTri> frame_tris;
  std::vector<DecalTri> frame_decals;
  std::vector<ProjTri> proj_tris;
  std::vector<ProjTri> proj_decals;
  std::vector<std::uint8_t> decal_factor;
  std::vector<std::uint8_t> used;
  std::vector<ShadeRec> recs;
  std::vector<double> zbuf;
  std::vector<std::uint32_t> tribuf;
  std::vector<std::uint8_t> factor;
  std::vector<float> depth_m;

  std::uint16_t AllocInstance(const InstanceInfo& info)
  {
    const std::uint16_t id = static_cast<std::uint16_t>(next_instance);
    next_instance = next_instance >= 59999 ? 1 : next_instance + 1;
    registry[id] = info;
    return id;
  }

  const TileCache& EnsureTile(const TileInstance& tile, const SubSequenceState& state,
                              const SeedPath& root)
  {
    auto it = tile_cache.find(tile.index);
    if (it != tile_cache.end()) return it->second;

    TileCache cache;
    cache.subseq = tile.subseq;
    const TileLayout& layout = LayoutCatalog()[tile.layout];
    const GroundBake bake = BakeGround(state.world.weather);

    MeshWriter w(&cache.static_tris);
    w.Begin(tile.world_pose, kLabelBackground, kNoInstance,
            HashString("tile") + static_cast<std::uint64_t>(tile.index));
    BuildStreetSurfaces(w, layout, bake);

    if (state.world.weather.kind == WeatherKind::Rain) {
      RandomSource src =
          DeriveSource(root.Child("tile", static_cast<std::uint64_t>(tile.index)).Child("puddles"));
      const int count = static_cast<int>(std::lround(state.world.weather.ground_density * 6.0));
      for (int i = 0; i < count; ++i) {
        const double s = SampleUniform(src, 1.0, layout.track_length - 1.0);
        const double lateral = SampleUniform(src, -4.0, 4.0);
        const double rx = SampleUniform(src, 0.7, 1.7);
        const Pose2 track = LayoutTrackPose(layout, s);
        const Vec2 pos = Apply(track, Vec2{0, lateral});
        const Pose2 local{pos.x, pos.y, track.heading};
        DecalOctagon(&cache.static_decals, Compose(tile.world_pose, local), rx, rx * 0.55,
                     kZDecal, kPuddleFactor);
      }
    }

    const AssetCatalog& catalog = BuiltinCatalog();
    for (const PlacedEntity& e : tile.entities) {
      if (e.category == ObjectCategory::Vehicle) {
        // Live vehicles belong to the traffic sim; the placed record is only
        // the spawn blueprint.
        cache.entity_instance.push_back(kNoInstance);
        continue;
      }
      const std::uint16_t id =
          AllocInstance(InstanceInfo{e.category, tile.index, tile.subseq});
      cache.entity_instance.push_back(id);
      if (e.category == ObjectCategory::Human) continue;  // rebuilt per frame

      const std::string& entry_id =
          catalog.Of(e.category).entries[static_cast<std::size_t>(e.entry)].id;
      const Pose2 pose = Compose(tile.world_pose, Pose2{e.pos.x, e.pos.y, e.heading});
      w.Begin(pose, SemanticLabel(e.category), id, HashString(entry_id) + id);
      switch (e.category) {
      case ObjectCategory::Building: BuildBuilding(w, entry_id); break;
      case ObjectCategory::Tree:
        BuildTree(w, entry_id);
        DecalOctagon(&cache.static_decals, pose, 1.3, 1.3, kZDecal, kAoFactor);
        break;
      case ObjectCategory::Lamp:
        BuildLamp(w);
        DecalOctagon(&cache.static_decals, pose, 0.5, 0.5, kZDecal, kAoFactor);
        break;
      default: break;
      }
    }

    return tile_cache.emplace(tile.index, std::move(cache)).first->second;
  }
};

Renderer::Renderer(const CameraIntrinsics& intrinsics, const RendererOptions& options)
    : impl_(new Impl)
{
  impl_->intr = intrinsics;
  impl_->opt = options;
  if (impl_->opt.threads < 1) impl_->opt.threads = 1;
}

Renderer::~Renderer() = default;

const CameraIntrinsics& Renderer::Intrinsics() const { return impl_->intr; }

void Renderer::SetThreads(int threads) { impl_->opt.threads = threads < 1 ? 1 : threads; }

void Renderer::SetModes(const RenderModes& modes) { impl_->opt.modes = modes; }

void Renderer::RenderFrame(WorldWindow& window, const TrafficSim& sim, const WorldState& state,
                           const SeedPath& frame_path, FrameSet& out)
{
  Impl& im = *impl_;
  const CameraIntrinsics& intr = im.intr;
  const int W = intr.width;
  const int H = intr.height;
  const std::size_t pixels = static_cast<std::size_t>(W) * H;
  const CamBasis cb = MakeBasis(intr, sim.Camera().pose, sim.Config().camera_height);
  const LightContext light = MakeLightContext(state);
  const bool monochrome = !state.render.color;
  const double kexp = ExposureScale(intr);
  const RenderModes& modes = im.opt.modes;
  const AssetCatalog& catalog = BuiltinCatalog();

  // Retire caches of tiles that left the window, then build missing ones.
  const int front_index = window.Active().front().index;
  for (auto it = im.tile_cache.begin(); it != im.tile_cache.end();) {
    if (it->first < front_index) {
      for (const std::uint16_t id : it->second.entity_instance) {
        if (id != kNoInstance) im.registry.erase(id);
      }
      it = im.tile_cache.erase(it);
    } else {
      ++it;
    }
  }

  // Gather world-space triangles: persistent tile meshes, then per-frame
  // pedestrians and live vehicles.
  im.frame_tris.clear();
  im.frame_decals.clear();
  out.instance_info.clear();

  double cam_s = 0;
  const TileInstance* cam_tile = window.TileContaining(sim.Camera().arc, &cam_s);
  const int cam_subseq = cam_tile ? cam_tile->subseq : 0;

  {
    // Backdrop plane out to the far clip so every below-horizon ray lands on
    // ground; uses the camera tile's weather bake.
    const GroundBake far_bake = BakeGround(window.StateOf(cam_subseq).world.weather);
    MeshWriter w(&im.frame_tris);
    w.Begin(Pose2{}, kLabelBackground, kNoInstance, HashString("backdrop"));
    w.SetSurface(far_bake.terrain);
    const double ext = cb.far_clip + 100.0;
    w.QuadUp(cb.eye.x - ext, cb.eye.y - ext, cb.eye.x + ext, cb.eye.y + ext, kZFarGround);
  }

  MeshWriter dyn(&im.frame_tris);
  for (const TileInstance& tile : window.Active()) {
    const Impl::TileCache& cache = im.EnsureTile(tile, window.StateOf(tile.subseq), window.Root());
    im.frame_tris.insert(im.frame_tris.end(), cache.static_tris.begin(),
                         cache.static_tris.end());
    im.frame_decals.insert(im.frame_decals.end(), cache.static_decals.begin(),
                           cache.static_decals.end());

    for (std::size_t i = 0; i < tile.entities.size(); ++i) {
      const PlacedEntity& e = tile.entities[i];
      const std::uint16_t id = cache.entity_instance[i];
      if (id == kNoInstance) continue;
      out.instance_info[id] = im.registry[id];
      if (e.category != ObjectCategory::Human) continue;
      const std::string& entry_id =
          catalog.Of(e.category).entries[static_cast<std::size_t>(e.entry)].id;
      const Pose2 pose = Compose(tile.world_pose, Pose2{e.pos.x, e.pos.y, e.heading});
      dyn.Begin(pose, kLabelHuman, id, HashString(entry_id) + id);
      BuildHuman(dyn, e, entry_id);
      DecalOctagon(&im.frame_decals, pose, 0.45, 0.45, kZDecal, kAoFactor);
    }
  }

  {
    // Drop id mappings of vehicles the sim has retired.
    std::vector<int> stale;
    for (const auto& [vid, iid] : im.vehicle_ids) {
      bool live = false;
      for (const AuxVehicle& v : sim.Vehicles()) {
        if (v.id == vid) live = true;
      }
      if (!live) {
        im.registry.erase(iid);
        stale.push_back(vid);
      }
    }
    for (const int vid : stale) im.vehicle_ids.erase(vid);
  }
  for (const AuxVehicle& v : sim.Vehicles()) {
    auto it = im.vehicle_ids.find(v.id);
    std::uint16_t id;
    if (it == im.vehicle_ids.end()) {
      double s = 0;
      const TileInstance* vt = window.TileContaining(v.arc, &s);
      id = im.AllocInstance(InstanceInfo{ObjectCategory::Vehicle, -1, vt ? vt->subseq : 0});
      im.vehicle_ids.emplace(v.id, id);
    } else {
      id = it->second;
    }
    out.instance_info[id] = im.registry[id];
    const std::string& entry_id =
        catalog.Of(ObjectCategory::Vehicle).entries[static_cast<std::size_t>(v.entry)].id;
    dyn.Begin(v.pose, kLabelVehicle, id, HashString(entry_id) + id);
    BuildVehicle(dyn, entry_id);
    DecalOctagon(&im.frame_decals, v.pose, 2.3, 1.2, kZDecal, kAoFactor);
  }

  // Project and clip. Backfaces are culled in world space; the survivors mark
  // which source triangles need a shading record.
  im.proj_tris.clear();
  im.proj_decals.clear();
  im.decal_factor.clear();
  im.used.assign(im.frame_tris.size(), 0);
  for (std::size_t i = 0; i < im.frame_tris.size(); ++i) {
    const SceneTri& t = im.frame_tris[i];
    if (Dot(t.normal, cb.eye - t.a) <= 1e-12) continue;
    const std::size_t before = im.proj_tris.size();
    ProjectClipped(cb, ToCamera(cb, t.a), ToCamera(cb, t.b), ToCamera(cb, t.c),
                   static_cast<std::uint32_t>(i), &im.proj_tris);
    if (im.proj_tris.size() != before) im.used[i] = 1;
  }
  for (const DecalTri& d : im.frame_decals) {
    if (cb.eye.z <= d.a.z) continue;  // decals face up
    const std::uint32_t slot = static_cast<std::uint32_t>(im.decal_factor.size());
    im.decal_factor.push_back(d.factor);
    ProjectClipped(cb, ToCamera(cb, d.a), ToCamera(cb, d.b), ToCamera(cb, d.c), slot,
                   &im.proj_decals);
  }

  // Flat shading: one record per visible source triangle, view direction from
  // its centroid.
  im.recs.assign(im.frame_tris.size(), ShadeRec{});
  for (std::size_t i = 0; i < im.frame_tris.size(); ++i) {
    if (!im.used[i]) continue;
    const SceneTri& t = im.frame_tris[i];
    ShadeRec& r = im.recs[i];
    if (modes.color) {
      if (t.emissive) {
        const Vec3 lin = t.emissive_color * std::max(light.intensity_lux, kEmissiveFloorLux);
        r.linear = monochrome ? Gray(Luminance(lin)) : lin;
      } else {
        MaterialParams mat;
        mat.base_color = t.albedo;
        mat.metallicity = t.metallicity;
        mat.roughness = t.roughness;
        mat.has_normal_detail = t.normal_detail;
        const Vec3 centroid = (t.a + t.b + t.c) * (1.0 / 3.0);
        const Vec3 view = Normalized(cb.eye - centroid);
        r.linear = ShadePixel(mat, t.normal, t.jitter, view, light, state.render);
      }
    }
    if (modes.normal) {
      r.nx = NormalByte(Dot(cb.right, t.normal));
      r.ny = NormalByte(Dot(cb.up, t.normal));
      r.nz = NormalByte(Dot(cb.fwd, t.normal));
    }
    r.label = t.label;
    r.instance = t.instance;
  }

  // Raster into depth + triangle id, then decal factors, then resolve.
  im.zbuf.assign(pixels, 0.0);
  im.tribuf.assign(pixels, kNoTri);
  im.factor.assign(pixels, 128);
  im.depth_m.assign(pixels, static_cast<float>(cb.far_clip));

  const double inv_far = 1.0 / cb.far_clip;
  const int threads = im.opt.threads;

  ParallelBands(H, threads, [&](int y0, int y1) {
    for (const ProjTri& t : im.proj_tris) {
      RasterTri(t, W, y0, y1, [&](int px, int py, double iz) {
        if (iz < inv_far) return;
        const std::size_t idx = static_cast<std::size_t>(py) * W + px;
        if (iz > im.zbuf[idx]) {
          im.zbuf[idx] = iz;
          im.tribuf[idx] = t.src;
        }
      });
    }
  });

  if (modes.color) {
    ParallelBands(H, threads, [&](int y0, int y1) {
      for (const ProjTri& t : im.proj_decals) {
        const std::uint8_t f = im.decal_factor[t.src];
        RasterTri(t, W, y0, y1, [&](int px, int py, double iz) {
          if (iz < inv_far) return;
          const std::size_t idx = static_cast<std::size_t>(py) * W + px;
          if (im.tribuf[idx] != kNoTri && iz >= im.zbuf[idx]) im.factor[idx] = f;
        });
      }
    });
  }

  // Sky gradient per row; the horizon sits at the principal row because the
  // camera never pitches.
  std::vector<std::array<std::uint8_t, 3>> sky_rows(static_cast<std::size_t>(H));
  {
    const bool cloudy =
        state.weather.kind == WeatherKind::Overcast || state.weather.clouds_active;
    const Vec3 zenith{0.30, 0.46, 0.78};
    const Vec3 horizon{0.62, 0.72, 0.85};
    for (int y = 0; y < H; ++y) {
      const double u = Clamp01((cb.cy - (y + 0.5)) / cb.cy);
      Vec3 c = Lerp(horizon, zenith, u);
      if (cloudy) c = Lerp(c, Gray(Luminance(c)), 0.8);
      if (monochrome) c = Gray(Luminance(c));
      const Vec3 lin = c * (0.5 * light.intensity_lux);
      sky_rows[static_cast<std::size_t>(y)] = {ExposeChannel(lin.x, kexp),
                                               ExposeChannel(lin.y, kexp),
                                               ExposeChannel(lin.z, kexp)};
    }
  }

  out.width = W;
  out.height = H;
  out.color = ImageU8(W, H, 3);
  out.semantic = ImageU8(W, H, 1);
  out.depth = ImageU16(W, H);
  out.normal = ImageU8(W, H, 3);
  out.instance.assign(pixels, kNoInstance);

  ParallelBands(H, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < W; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * W + x;
        const std::uint32_t tri = im.tribuf[idx];
        if (tri == kNoTri) {
          if (modes.color) {
            const auto& sky = sky_rows[static_cast<std::size_t>(y)];
            std::uint8_t* color = &out.color.data[idx * 3];
            color[0] = sky[0];
            color[1] = sky[1];
            color[2] = sky[2];
          }
          if (modes.semantic) out.semantic.data[idx] = kLabelSky;
          if (modes.depth) out.depth.data[idx] = kDepthSky;
          if (modes.normal) {
            std::uint8_t* normal = &out.normal.data[idx * 3];
            normal[0] = normal[1] = normal[2] = 128;
          }
          continue;
        }
        const ShadeRec& r = im.recs[tri];
        const double depth = 1.0 / im.zbuf[idx];
        im.depth_m[idx] = static_cast<float>(depth);
        if (modes.depth) {
          out.depth.data[idx] = static_cast<std::uint16_t>(
              std::min<long>(65534, std::lround(depth * kDepthUnitsPerMeter)));
        }
        if (modes.semantic) {
          out.semantic.data[idx] = r.label;
          out.instance[idx] = r.instance;
        }
        if (modes.normal) {
          std::uint8_t* normal = &out.normal.data[idx * 3];
          normal[0] = r.nx;
          normal[1] = r.ny;
          normal[2] = r.nz;
        }
        if (modes.color) {
          std::uint8_t* color = &out.color.data[idx * 3];
          const double f = im.factor[idx] * (1.0 / 128.0);
          color[0] = ExposeChannel(r.linear.x * f, kexp);
          color[1] = ExposeChannel(r.linear.y * f, kexp);
          color[2] = ExposeChannel(r.linear.z * f, kexp);
        }
      }
    }
  });

  // Display-space weather compositing: fog first, then precipitation
  // particles, then lens droplets. Labels and depth stay untouched.
  const WeatherState& weather = state.weather;
  double fog_density = 0;
  if (weather.kind == WeatherKind::Fog) {
    fog_density = weather.density;
  } else if (weather.fog_active) {
    fog_density = 0.5 * weather.density;
  }
  if (modes.color) ApplyFog(out.color, im.depth_m, fog_density, monochrome);

  if (!modes.color) {
    out.meta.world = state;
    out.meta.camera_tile = cam_tile ? cam_tile->index : 0;
    return;
  }

  if (weather.kind == WeatherKind::Rain && weather.density > 0) {
    RandomSource src = DeriveSource(frame_path.Child("rain"));
    const int n = static_cast<int>(std::lround(weather.density * 350.0));
    const double cr = monochrome ? 202.0 : 198.0;
    const double cg = monochrome ? 202.0 : 203.0;
    const double cb2 = monochrome ? 202.0 : 210.0;
    for (int i = 0; i < n; ++i) {
      const double x0 = SampleUniform(src, 0.0, W - 1.0);
      const double y0 = SampleUniform(src, 0.0, H - 1.0);
      const int len = SampleUniformInt(src, 14, 32);
      const double slope = SampleUniform(src, -4.0, 2.0);
      const double alpha = SampleUniform(src, 0.22, 0.40);
      for (int t = 0; t < len; ++t) {
        const int px = static_cast<int>(std::lround(x0 + slope * t / len));
        const int py = static_cast<int>(std::lround(y0)) + t;
        if (px < 0 || px >= W || py < 0 || py >= H) continue;
        std::uint8_t* p = &out.color.data[(static_cast<std::size_t>(py) * W + px) * 3];
        p[0] = static_cast<std::uint8_t>(std::lround(p[0] + (cr - p[0]) * alpha));
        p[1] = static_cast<std::uint8_t>(std::lround(p[1] + (cg - p[1]) * alpha));
        p[2] = static_cast<std::uint8_t>(std::lround(p[2] + (cb2 - p[2]) * alpha));
      }
    }
  } else if (weather.kind == WeatherKind::Snow && weather.density > 0) {
    RandomSource src = DeriveSource(frame_path.Child("snow"));
    const int n = static_cast<int>(std::lround(weather.density * 500.0));
    const double cw = monochrome ? 236.0 : 235.0;
    const double cg = 236.0;
    const double cb2 = monochrome ? 236.0 : 240.0;
    for (int i = 0; i < n; ++i) {
      const int cx = SampleUniformInt(src, 0, W - 1);
      const int cy = SampleUniformInt(src, 0, H - 1);
      const double r = SampleUniform(src, 0.8, 2.2);
      const double alpha = SampleUniform(src, 0.35, 0.6);
      const int ir = static_cast<int>(std::ceil(r));
      for (int dy = -ir; dy <= ir; ++dy) {
        for (int dx = -ir; dx <= ir; ++dx) {
          if (dx * dx + dy * dy > r * r) continue;
          const int px = cx + dx, py = cy + dy;
          if (px < 0 || px >= W || py < 0 || py >= H) continue;
          std::uint8_t* p = &out.color.data[(static_cast<std::size_t>(py) * W + px) * 3];
          p[0] = static_cast<std::uint8_t>(std::lround(p[0] + (cw - p[0]) * alpha));
          p[1] = static_cast<std::uint8_t>(std::lround(p[1] + (cg - p[1]) * alpha));
          p[2] = static_cast<std::uint8_t>(std::lround(p[2] + (cb2 - p[2]) * alpha));
        }
      }
    }
  }

  if ((weather.kind == WeatherKind::Rain || weather.kind == WeatherKind::Snow) &&
      weather.lens_effect > 0.005) {
    RandomSource src = DeriveSource(frame_path.Child("lens"));
    const std::vector<std::uint8_t> base = out.color.data;
    const int n = static_cast<int>(std::lround(weather.lens_effect * 16.0));
    for (int i = 0; i < n; ++i) {
      const int cx = SampleUniformInt(src, 0, W - 1);
      const int cy = SampleUniformInt(src, 0, H - 1);
      const double r = SampleUniform(src, 5.0, 16.0);
      const int ir = static_cast<int>(std::ceil(r));
      for (int dy = -ir; dy <= ir; ++dy) {
        for (int dx = -ir; dx <= ir; ++dx) {
          const double d2 = dx * dx + dy * dy;
          if (d2 > r * r) continue;
          const int px = cx + dx, py = cy + dy;
          if (px < 0 || px >= W || py < 0 || py >= H) continue;
          // Droplets magnify: sample the frame closer to the droplet center.
          const int sx = std::clamp(cx + static_cast<int>(std::lround(dx * 0.45)), 0, W - 1);
          const int sy = std::clamp(cy + static_cast<int>(std::lround(dy * 0.45)), 0, H - 1);
          const std::uint8_t* s = &base[(static_cast<std::size_t>(sy) * W + sx) * 3];
          std::uint8_t* p = &out.color.data[(static_cast<std::size_t>(py) * W + px) * 3];
          const bool rim = d2 > (r - 1.5) * (r - 1.5);
          for (int c = 0; c < 3; ++c) {
            const int v = rim ? (s[c] * 3) / 4 : std::min(255, s[c] + 6);
            p[c] = static_cast<std::uint8_t>(v);
          }
        }
      }
    }
  }

  out.meta.world = state;
  out.meta.camera_tile = cam_tile ? cam_tile->index : 0;
}

}  // namespace urbangen
