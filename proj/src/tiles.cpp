#include "urbangen/tiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urbangen {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Span {
  double lo = 0;
  double hi = 0;
};

// Sidewalk sub-strips per category keep spawn volumes of distinct categories
// disjoint: lamps curbside, humans mid-walk, trees at the back edge.
void AddSideBands(std::vector<SpawnVolume>& out, double side, const std::vector<Span>& spans)
{
  const double toward_street = side > 0 ? -kPi / 2 : kPi / 2;
  auto add = [&](ObjectCategory cat, double lo, double hi, double x0, double x1, const Span& s) {
    const double a = std::max(s.lo, x0);
    const double b = std::min(s.hi, x1);
    if (b <= a) return;
    const double y0 = side > 0 ? lo : -hi;
    const double y1 = side > 0 ? hi : -lo;
    out.push_back(SpawnVolume{cat, Rect{a, y0, b, y1}, toward_street});
  };
  for (const Span& s : spans) {
    add(ObjectCategory::Lamp, 5.05, 5.55, 2.0, 28.0, s);
    add(ObjectCategory::Human, 5.6, 7.3, 1.5, 28.5, s);
    add(ObjectCategory::Tree, 7.35, 7.95, 2.0, 28.0, s);
    add(ObjectCategory::Building, 13.0, 15.0, 4.0, 26.0, s);
  }
}

void AddVehicleBand(std::vector<SpawnVolume>& out, double x0, double x1)
{
  out.push_back(SpawnVolume{ObjectCategory::Vehicle, Rect{x0, -1.5, x1, 1.5}, 0.0});
}

SpawnVolume MirrorY(SpawnVolume v)
{
  const double y0 = v.rect.y0;
  v.rect.y0 = -v.rect.y1;
  v.rect.y1 = -y0;
  v.facing = -v.facing;
  return v;
}

TileLayout MakeStraight()
{
  TileLayout t;
  t.kind = TileLayoutKind::Straight;
  t.family = LayoutFamily::Straight;
  t.exit_anchor = Pose2{kTileSize, 0, 0};
  t.track_length = kTileSize;
  AddSideBands(t.volumes, +1, {{1, 29}});
  AddSideBands(t.volumes, -1, {{1, 29}});
  AddVehicleBand(t.volumes, 2, 28);
  return t;
}

// Crossings keep the camera track straight; the crossing street occupies
// x in [10, 20] plus sidewalks, so gapped sides spawn only near the corners.
TileLayout MakeCrossing(TileLayoutKind kind)
{
  TileLayout t;
  t.kind = kind;
  t.family = LayoutFamily::Crossing;
  t.exit_anchor = Pose2{kTileSize, 0, 0};
  t.track_length = kTileSize;
  const std::vector<Span> full = {{1, 29}};
  const std::vector<Span> gapped = {{1, 7}, {23, 29}};
  const bool left_open = kind == TileLayoutKind::CrossingTLeft || kind == TileLayoutKind::CrossingX;
  const bool right_open = kind == TileLayoutKind::CrossingTRight || kind == TileLayoutKind::CrossingX;
  AddSideBands(t.volumes, +1, left_open ? gapped : full);
  AddSideBands(t.volumes, -1, right_open ? gapped : full);
  AddVehicleBand(t.volumes, 2, 28);
  return t;
}

// A left curve bends the street around the arc center (0, 15). Volumes are
// small axis-aligned pockets verified against the street annulus, so curves
// spawn sparser streetside props than straights.
TileLayout MakeCurveLeft()
{
  TileLayout t;
  t.kind = TileLayoutKind::CurveLeft;
  t.family = LayoutFamily::Curve;
  t.exit_anchor = Pose2{kCurveRadius, kCurveRadius, kPi / 2};
  t.track_length = kCurveRadius * kPi / 2;

  auto add = [&](ObjectCategory cat, Rect r, double facing) {
    t.volumes.push_back(SpawnVolume{cat, r, facing});
  };
  // Inner pocket (around the arc center).
  add(ObjectCategory::Building, Rect{0.0, 13.5, 2.0, 15.0}, -kPi / 4);
  // Outer corner terrain.
  add(ObjectCategory::Building, Rect{25.0, -14.0, 29.0, -8.0}, 3 * kPi / 4);
  // Outer sidewalk stubs near the entry (tile frame still axis-aligned there).
  add(ObjectCategory::Lamp, Rect{0.5, -5.9, 4.0, -5.1}, kPi / 2);
  add(ObjectCategory::Human, Rect{0.5, -7.0, 4.0, -6.0}, kPi / 2);
  add(ObjectCategory::Tree, Rect{0.5, -7.9, 4.0, -7.1}, kPi / 2);
  // Outer sidewalk stubs near the exit (street runs along +y at x = 15).
  add(ObjectCategory::Lamp, Rect{20.1, 11.0, 20.9, 14.5}, kPi);
  add(ObjectCategory::Human, Rect{21.0, 11.0, 22.0, 14.5}, kPi);
  add(ObjectCategory::Tree, Rect{22.1, 11.0, 22.9, 14.5}, kPi);
  // Inner sidewalk stubs.
  add(ObjectCategory::Lamp, Rect{0.3, 5.1, 1.2, 5.9}, -kPi / 2);
  add(ObjectCategory::Human, Rect{0.3, 6.0, 1.2, 7.0}, -kPi / 2);
  add(ObjectCategory::Lamp, Rect{9.1, 13.8, 9.9, 14.7}, 0.0);
  add(ObjectCategory::Human, Rect{8.0, 13.8, 9.0, 14.7}, 0.0);
  // Vehicles spawn on the near-tangent entry stretch and project to the arc.
  AddVehicleBand(t.volumes, 1, 5);
  return t;
}

TileLayout MakeCurveRight()
{
  TileLayout t = MakeCurveLeft();
  t.kind = TileLayoutKind::CurveRight;
  t.exit_anchor = Pose2{kCurveRadius, -kCurveRadius, -kPi / 2};
  for (auto& v : t.volumes) v = MirrorY(v);
  return t;
}

std::vector<TileLayout> MakeLayouts()
{
  // Order matches the street asset entries: straight_01, curve_01..02,
  // crossing_01..03.
  std::vector<TileLayout> layouts;
  layouts.push_back(MakeStraight());
  layouts.push_back(MakeCurveLeft());
  layouts.push_back(MakeCurveRight());
  layouts.push_back(MakeCrossing(TileLayoutKind::CrossingTLeft));
  layouts.push_back(MakeCrossing(TileLayoutKind::CrossingTRight));
  layouts.push_back(MakeCrossing(TileLayoutKind::CrossingX));
  return layouts;
}

AssetCategory FamilyCategory(LayoutFamily family)
{
  const AssetCategory& street = BuiltinCatalog().street;
  const AssetGroup& group = street.groups[static_cast<int>(family)];
  AssetCategory cat;
  cat.name = group.id;
  cat.groups.push_back(AssetGroup{group.id, 0, group.count});
  for (int i = 0; i < group.count; ++i) {
    cat.entries.push_back(AssetEntry{street.entries[group.first + i].id, 0});
  }
  return cat;
}

int LayoutIndexFor(LayoutFamily family, int entry)
{
  const AssetGroup& group = BuiltinCatalog().street.groups[static_cast<int>(family)];
  return group.first + entry;
}

}  // namespace

const std::vector<TileLayout>& LayoutCatalog()
{
  static const std::vector<TileLayout> layouts = MakeLayouts();
  return layouts;
}

Pose2 LayoutTrackPose(const TileLayout& layout, double s)
{
  switch (layout.kind) {
  case TileLayoutKind::CurveLeft: {
    const double a = s / kCurveRadius;
    return Pose2{kCurveRadius * std::sin(a), kCurveRadius * (1 - std::cos(a)), a};
  }
  case TileLayoutKind::CurveRight: {
    const double a = s / kCurveRadius;
    return Pose2{kCurveRadius * std::sin(a), -kCurveRadius * (1 - std::cos(a)), -a};
  }
  default: return Pose2{s, 0, 0};
  }
}

double FootprintRadius(ObjectCategory c)
{
  switch (c) {
  case ObjectCategory::Building: return 6.0;
  case ObjectCategory::Tree: return 1.5;
  case ObjectCategory::Lamp: return 0.3;
  case ObjectCategory::Human: return 0.4;
  case ObjectCategory::Vehicle: return 2.2;
  }
  return 0.5;
}

SubSequenceState BuildSubSequenceState(const SeedPath& root,
                                       const std::vector<SubSequenceParams>& schedule, int t)
{
  const SubSequenceParams& params = schedule.at(static_cast<std::size_t>(t));
  SubSequenceState state;
  state.world = SampleWorldState(root, schedule, t);

  RandomSource exist_src = DeriveSource(root.Child("subseq", static_cast<std::uint64_t>(t)).Child("exist"));
  state.existence = SampleExistence(exist_src, params);

  const AssetCatalog& catalog = BuiltinCatalog();
  for (int c = 0; c < kObjectCategoryCount; ++c) {
    state.entry_weights[c] = ResolveAssetWeights(catalog.categories[c], params.asset_weights[c]);
  }
  state.straight_weights =
      ResolveAssetWeights(FamilyCategory(LayoutFamily::Straight), params.street.straight_weights);
  state.curve_weights =
      ResolveAssetWeights(FamilyCategory(LayoutFamily::Curve), params.street.curve_weights);
  state.crossing_weights =
      ResolveAssetWeights(FamilyCategory(LayoutFamily::Crossing), params.street.crossing_weights);
  return state;
}

void PopulateTile(TileInstance& tile, const SeedPath& root, const SubSequenceParams& params,
                  const SubSequenceState& state)
{
  const TileLayout& layout = LayoutCatalog()[tile.layout];
  const SeedPath tile_path = root.Child("tile", static_cast<std::uint64_t>(tile.index));

  RandomSource counts_src = DeriveSource(tile_path.Child("counts"));
  tile.sampled_counts = SampleObjectCounts(counts_src, state.existence, params.count_max);

  for (int c = 0; c < kObjectCategoryCount; ++c) {
    const ObjectCategory cat = static_cast<ObjectCategory>(c);
    const int want = tile.sampled_counts[c];
    if (want == 0) continue;

    std::vector<const SpawnVolume*> volumes;
    std::vector<double> areas;
    for (const SpawnVolume& v : layout.volumes) {
      if (v.category == cat) {
        volumes.push_back(&v);
        areas.push_back(v.rect.Area());
      }
    }
    RandomSource src = DeriveSource(tile_path.Child("populate", static_cast<std::uint64_t>(c)));
    for (int i = 0; i < want; ++i) {
      const int entry = SampleCategorical(src, state.entry_weights[c]);
      if (volumes.empty()) {
        ++tile.dropped[c];
        continue;
      }

      const double radius = FootprintRadius(cat);
      bool placed = false;
      Vec2 pos;
      const SpawnVolume* vol = nullptr;
      for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
        vol = volumes[static_cast<std::size_t>(SampleCategorical(src, areas))];
        pos = Vec2{SampleUniform(src, vol->rect.x0, vol->rect.x1),
                   SampleUniform(src, vol->rect.y0, vol->rect.y1)};
        placed = true;
        for (const PlacedEntity& other : tile.entities) {
          if (other.category != cat) continue;
          if (Length(pos - other.pos) < radius + other.footprint_radius) {
            placed = false;
            break;
          }
        }
      }
      if (!placed) {
        ++tile.dropped[c];
        continue;
      }

      PlacedEntity e;
      e.category = cat;
      e.entry = entry;
      e.pos = pos;
      e.heading = vol->facing;
      e.footprint_radius = radius;
      if (cat == ObjectCategory::Human) {
        const int gait = SampleCategorical(src, {params.walk_weight, params.idle_weight});
        e.gait = static_cast<Gait>(gait);
        e.walk_target = pos;
        if (e.gait == Gait::Walk) {
          e.walk_target = Vec2{SampleUniform(src, vol->rect.x0, vol->rect.x1),
                               SampleUniform(src, vol->rect.y0, vol->rect.y1)};
          const Vec2 d = e.walk_target - pos;
          if (Length(d) > 1e-9) e.heading = std::atan2(d.y, d.x);
        }
        e.walk_phase = SampleUniform(src, 0.0, 1.0);
      } else if (cat == ObjectCategory::Vehicle) {
        e.speed = SampleUniform(src, 2.0, 14.0);
      }
      tile.entities.push_back(e);
    }
  }
}

WorldWindow::WorldWindow(const std::vector<SubSequenceParams>* schedule, SeedPath root,
                         int window_tiles)
    : schedule_(schedule), root_(root), window_tiles_(window_tiles)
{
  if (schedule->empty()) throw std::invalid_argument("schedule needs at least one sub-sequence");
  if (window_tiles < 3) throw std::invalid_argument("window needs at least 3 tiles");
  for (std::size_t t = 0; t < schedule->size(); ++t) {
    for (int i = 0; i < (*schedule)[t].n_tiles; ++i) subseq_of_tile_.push_back(static_cast<int>(t));
  }
  total_tiles_ = static_cast<int>(subseq_of_tile_.size());
  states_.resize(schedule->size());
  state_ready_.assign(schedule->size(), false);
  while (static_cast<int>(tiles_.size()) < window_tiles_) SpawnNext();
}

int WorldWindow::SubseqOfTile(int tile_index) const
{
  if (tile_index < 0) return 0;
  if (tile_index >= total_tiles_) return static_cast<int>(schedule_->size()) - 1;
  return subseq_of_tile_[tile_index];
}

const SubSequenceState& WorldWindow::StateOf(int subseq)
{
  if (!state_ready_[subseq]) {
    states_[subseq] = BuildSubSequenceState(root_, *schedule_, subseq);
    state_ready_[subseq] = true;
  }
  return states_[subseq];
}

void WorldWindow::SpawnNext()
{
  const int k = next_tile_;
  const int t = SubseqOfTile(k);
  const SubSequenceParams& params = (*schedule_)[t];
  const SubSequenceState& state = StateOf(t);

  if (straight_run_remaining_ < 0) {
    RandomSource init_src = DeriveSource(root_.Child("run_init"));
    straight_run_remaining_ = static_cast<int>(std::max(
        1L, std::lround(SampleNormal(init_src, params.street.run_mean, params.street.run_sd))));
  }

  RandomSource layout_src = DeriveSource(root_.Child("tile", static_cast<std::uint64_t>(k)).Child("layout"));
  LayoutFamily family = LayoutFamily::Straight;
  int entry = 0;
  if (straight_run_remaining_ > 0) {
    --straight_run_remaining_;
    entry = SampleCategorical(layout_src, state.straight_weights);
  } else {
    const bool curve = SampleBernoulli(layout_src, 0.5);
    family = curve ? LayoutFamily::Curve : LayoutFamily::Crossing;
    entry = SampleCategorical(layout_src, curve ? state.curve_weights : state.crossing_weights);
    straight_run_remaining_ = static_cast<int>(std::max(
        1L, std::lround(SampleNormal(layout_src, params.street.run_mean, params.street.run_sd))));
  }

  TileInstance tile;
  tile.index = k;
  tile.subseq = t;
  tile.layout = LayoutIndexFor(family, entry);
  tile.world_pose = next_pose_;
  tile.arc_start = next_arc_;
  PopulateTile(tile, root_, params, state);

  const TileLayout& layout = LayoutCatalog()[tile.layout];
  for (const PlacedEntity& e : tile.entities) {
    if (e.category != ObjectCategory::Vehicle) continue;
    // Project the spawn position onto the tile's track arc.
    double s = 0;
    if (layout.family == LayoutFamily::Curve) {
      const double ratio = std::clamp(e.pos.x / kCurveRadius, 0.0, 1.0);
      s = kCurveRadius * std::asin(ratio);
    } else {
      s = std::clamp(e.pos.x, 0.0, layout.track_length);
    }
    const Pose2 track = LayoutTrackPose(layout, s);
    const double lateral = Dot(Left(track), e.pos - Vec2{track.x, track.y});
    pending_vehicles_.push_back(VehicleSpawn{e.entry, tile.arc_start + s, lateral, e.speed});
  }

  next_pose_ = Compose(next_pose_, layout.exit_anchor);
  next_arc_ += layout.track_length;
  ++next_tile_;
  tiles_.push_back(std::move(tile));
}

void WorldWindow::Advance(int camera_tile)
{
  while (!tiles_.empty() && tiles_.front().index < camera_tile - 1) tiles_.pop_front();
  while (static_cast<int>(tiles_.size()) < window_tiles_) SpawnNext();
}

const TileInstance* WorldWindow::TileAt(int tile_index) const
{
  for (const TileInstance& t : tiles_) {
    if (t.index == tile_index) return &t;
  }
  return nullptr;
}

TileInstance* WorldWindow::TileAt(int tile_index)
{
  for (TileInstance& t : tiles_) {
    if (t.index == tile_index) return &t;
  }
  return nullptr;
}

const TileInstance* WorldWindow::TileContaining(double arc, double* local_s) const
{
  if (tiles_.empty()) return nullptr;
  for (const TileInstance& t : tiles_) {
    const double len = LayoutCatalog()[t.layout].track_length;
    if (arc < t.arc_start + len || &t == &tiles_.back()) {
      if (local_s) *local_s = std::clamp(arc - t.arc_start, 0.0, len);
      return &t;
    }
  }
  return nullptr;
}

double WorldWindow::TrackEndArc() const
{
  if (tiles_.empty()) return 0;
  const TileInstance& last = tiles_.back();
  return last.arc_start + LayoutCatalog()[last.layout].track_length;
}

Pose2 WorldWindow::TrackPoseAt(double arc) const
{
  double s = 0;
  const TileInstance* tile = TileContaining(arc, &s);
  if (!tile) return Pose2{};
  return Compose(tile->world_pose, LayoutTrackPose(LayoutCatalog()[tile->layout], s));
}

std::vector<VehicleSpawn> WorldWindow::TakeVehicleSpawns()
{
  std::vector<VehicleSpawn> out;
  out.swap(pending_vehicles_);
  return out;
}

}  // namespace urbangen
