#pragma once

#include <array>
#include <deque>
#include <vector>

#include "urbangen/assets.hpp"
#include "urbangen/geometry.hpp"
#include "urbangen/model.hpp"
#include "urbangen/random.hpp"

namespace urbangen {

// Tiles are 30 m squares. The tile frame has the entry anchor at the origin
// heading +x; the street occupies |y| <= 5, sidewalks 5..8, terrain beyond.
constexpr double kTileSize = 30.0;
constexpr double kStreetHalfWidth = 5.0;
constexpr double kSidewalkWidth = 3.0;
constexpr double kCurveRadius = 15.0;

enum class TileLayoutKind {
  Straight = 0,
  CurveLeft,
  CurveRight,
  CrossingTLeft,
  CrossingTRight,
  CrossingX,
};

// Families index the street asset groups: 0 straight, 1 curve, 2 crossing.
enum class LayoutFamily { Straight = 0, Curve = 1, Crossing = 2 };

struct SpawnVolume {
  ObjectCategory category = ObjectCategory::Building;
  Rect rect;
  double facing = 0;  // default heading for placed entities, tile frame
};

struct TileLayout {
  TileLayoutKind kind = TileLayoutKind::Straight;
  LayoutFamily family = LayoutFamily::Straight;
  Pose2 exit_anchor;    // entry anchor is the identity pose
  double track_length = kTileSize;
  std::vector<SpawnVolume> volumes;
};

// Layout order matches BuiltinCatalog().street entries.
const std::vector<TileLayout>& LayoutCatalog();

// Centerline pose in the tile frame at arc distance s from the entry.
Pose2 LayoutTrackPose(const TileLayout& layout, double s);

double FootprintRadius(ObjectCategory c);

enum class Gait { Walk = 0, StandIdle = 1 };

struct PlacedEntity {
  ObjectCategory category = ObjectCategory::Building;
  int entry = 0;  // index into the category's asset entries
  Vec2 pos;       // tile frame
  double heading = 0;
  double footprint_radius = 0;
  // Pedestrian state (category == Human); positions stay in the tile frame.
  Gait gait = Gait::StandIdle;
  Vec2 walk_target;
  double walk_phase = 0;
  // Vehicle spawn parameters (category == Vehicle); consumed by dynamics.
  double speed = 0;
};

struct TileInstance {
  int index = 0;    // global tile index along the stream
  int subseq = 0;   // owning sub-sequence
  int layout = 0;   // index into LayoutCatalog()
  Pose2 world_pose;
  double arc_start = 0;
  std::array<int, kObjectCategoryCount> sampled_counts{};
  std::array<int, kObjectCategoryCount> dropped{};
  std::vector<PlacedEntity> entities;
};

// Everything sampled once per sub-sequence and shared by its tiles.
struct SubSequenceState {
  WorldState world;
  std::array<bool, kObjectCategoryCount> existence{};
  std::array<std::vector<double>, kObjectCategoryCount> entry_weights;
  std::vector<double> straight_weights;
  std::vector<double> curve_weights;
  std::vector<double> crossing_weights;
};

SubSequenceState BuildSubSequenceState(const SeedPath& root,
                                       const std::vector<SubSequenceParams>& schedule, int t);

// Draws counts and placements for one tile. Placement rejects footprint
// overlaps against same-category entities with up to 16 attempts each, then
// drops the entity and counts the drop.
void PopulateTile(TileInstance& tile, const SeedPath& root, const SubSequenceParams& params,
                  const SubSequenceState& state);

// Vehicle spawn record exported to dynamics; arc/lateral are track coordinates.
struct VehicleSpawn {
  int entry = 0;
  double arc = 0;
  double lateral = 0;
  double speed = 0;
};

// Sliding window of active tiles along the camera track. Owns the straight-run
// layout chain, the seam bookkeeping between sub-sequences, and tile disposal.
class WorldWindow {
 public:
  WorldWindow(const std::vector<SubSequenceParams>* schedule, SeedPath root, int window_tiles);

  // Retires tiles more than one tile behind the camera tile and spawns ahead
  // until the window holds window_tiles() tiles again.
  void Advance(int camera_tile);

  const std::deque<TileInstance>& Active() const { return tiles_; }
  const SeedPath& Root() const { return root_; }
  int WindowTiles() const { return window_tiles_; }
  int SpawnedCount() const { return next_tile_; }
  int TotalScheduledTiles() const { return total_tiles_; }

  int SubseqOfTile(int tile_index) const;
  const TileInstance* TileAt(int tile_index) const;
  TileInstance* TileAt(int tile_index);

  // Tile containing the given track arc; fills the local arc offset.
  const TileInstance* TileContaining(double arc, double* local_s) const;
  double TrackEndArc() const;
  Pose2 TrackPoseAt(double arc) const;

  const SubSequenceState& StateOf(int subseq);

  // Vehicles spawned by tiles since the last call.
  std::vector<VehicleSpawn> TakeVehicleSpawns();

 private:
  void SpawnNext();

  const std::vector<SubSequenceParams>* schedule_;
  SeedPath root_;
  int window_tiles_;
  int total_tiles_ = 0;
  std::vector<int> subseq_of_tile_;  // prefix-expanded schedule buckets
  std::deque<TileInstance> tiles_;
  std::vector<SubSequenceState> states_;
  std::vector<bool> state_ready_;
  int next_tile_ = 0;
  int straight_run_remaining_ = -1;  // -1: initial run length not yet drawn
  Pose2 next_pose_;
  double next_arc_ = 0;
  std::vector<VehicleSpawn> pending_vehicles_;
};

}  // namespace urbangen
