#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "statutil.hpp"
#include "urbangen/tiles.hpp"

using namespace urbangen;
using statutil::Chi2PValue;
using statutil::Chi2Stat;
using statutil::Mean;
using statutil::NormalCdf;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<SubSequenceParams> SingleSchedule(int tiles,
                                              std::array<double, kObjectCategoryCount> exist = {
                                                  1, 1, 1, 1, 1})
{
  SubSequenceParams p;
  p.n_tiles = tiles;
  p.existence_probs = exist;
  return {p};
}

// Walks the camera tile by tile, recording each tile's layout index before it
// can retire.
std::vector<int> RecordLayouts(WorldWindow& w, int n)
{
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int cam = 0; cam < n; ++cam) {
    w.Advance(cam);
    const TileInstance* t = w.TileAt(cam);
    REQUIRE(t != nullptr);
    out.push_back(t->layout);
  }
  return out;
}

// Lateral distance from the street centerline in the tile frame. Straight and
// crossing tracks run along y = 0; curves run on a radius-15 circle around
// (0, +/-15).
double CenterlineDistance(const TileLayout& layout, Vec2 p)
{
  switch (layout.kind) {
  case TileLayoutKind::CurveLeft:
    return std::abs(kCurveRadius - Length(p - Vec2{0, kCurveRadius}));
  case TileLayoutKind::CurveRight:
    return std::abs(kCurveRadius - Length(p - Vec2{0, -kCurveRadius}));
  default: return std::abs(p.y);
  }
}

bool RectsOverlap(const Rect& a, const Rect& b)
{
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

}  // namespace

TEST_CASE("layout catalog geometry")
{
  const auto& layouts = LayoutCatalog();
  REQUIRE(layouts.size() == 6);
  REQUIRE(layouts.size() == BuiltinCatalog().street.entries.size());

  CHECK(layouts[0].kind == TileLayoutKind::Straight);
  CHECK(layouts[1].kind == TileLayoutKind::CurveLeft);
  CHECK(layouts[2].kind == TileLayoutKind::CurveRight);
  CHECK(layouts[3].kind == TileLayoutKind::CrossingTLeft);
  CHECK(layouts[4].kind == TileLayoutKind::CrossingTRight);
  CHECK(layouts[5].kind == TileLayoutKind::CrossingX);

  CHECK(layouts[0].family == LayoutFamily::Straight);
  CHECK(layouts[1].family == LayoutFamily::Curve);
  CHECK(layouts[2].family == LayoutFamily::Curve);
  for (int i = 3; i < 6; ++i) CHECK(layouts[i].family == LayoutFamily::Crossing);

  const double quarter = kCurveRadius * kPi / 2;
  for (int i : {0, 3, 4, 5}) {
    CHECK(layouts[i].exit_anchor.x == doctest::Approx(kTileSize).epsilon(1e-12));
    CHECK(layouts[i].exit_anchor.y == doctest::Approx(0).epsilon(1e-12));
    CHECK(layouts[i].exit_anchor.heading == doctest::Approx(0).epsilon(1e-12));
    CHECK(layouts[i].track_length == doctest::Approx(kTileSize).epsilon(1e-12));
  }
  CHECK(layouts[1].exit_anchor.x == doctest::Approx(kCurveRadius));
  CHECK(layouts[1].exit_anchor.y == doctest::Approx(kCurveRadius));
  CHECK(layouts[1].exit_anchor.heading == doctest::Approx(kPi / 2));
  CHECK(layouts[1].track_length == doctest::Approx(quarter));
  CHECK(layouts[2].exit_anchor.y == doctest::Approx(-kCurveRadius));
  CHECK(layouts[2].exit_anchor.heading == doctest::Approx(-kPi / 2));
  CHECK(layouts[2].track_length == doctest::Approx(quarter));
}

TEST_CASE("spawn volumes stay inside the tile, off the street, and per-category disjoint")
{
  for (const TileLayout& layout : LayoutCatalog()) {
    for (std::size_t i = 0; i < layout.volumes.size(); ++i) {
      const SpawnVolume& v = layout.volumes[i];
      CHECK(v.rect.x0 < v.rect.x1);
      CHECK(v.rect.y0 < v.rect.y1);
      CHECK(v.rect.x0 >= 0.0);
      CHECK(v.rect.x1 <= kTileSize);
      CHECK(v.rect.y0 >= -kTileSize / 2);
      CHECK(v.rect.y1 <= kTileSize / 2);

      const Vec2 corners[4] = {{v.rect.x0, v.rect.y0},
                               {v.rect.x1, v.rect.y0},
                               {v.rect.x0, v.rect.y1},
                               {v.rect.x1, v.rect.y1}};
      for (const Vec2& c : corners) {
        const double d = CenterlineDistance(layout, c);
        if (v.category == ObjectCategory::Vehicle) {
          CHECK(d <= 2.5);
        } else {
          CHECK(d >= kStreetHalfWidth);
        }
      }

      for (std::size_t j = i + 1; j < layout.volumes.size(); ++j) {
        const SpawnVolume& w = layout.volumes[j];
        if (w.category == v.category) continue;
        CHECK_FALSE(RectsOverlap(v.rect, w.rect));
      }
    }
  }
}

TEST_CASE("crossing spawn volumes clear the side street")
{
  const auto& layouts = LayoutCatalog();
  auto check_side = [](const TileLayout& layout, double side) {
    for (const SpawnVolume& v : layout.volumes) {
      if (v.category == ObjectCategory::Vehicle) continue;
      const bool on_side = side > 0 ? v.rect.y0 > 0 : v.rect.y1 < 0;
      if (!on_side) continue;
      CHECK((v.rect.x1 <= 9.5 || v.rect.x0 >= 20.5));
    }
  };
  check_side(layouts[3], +1);
  check_side(layouts[4], -1);
  check_side(layouts[5], +1);
  check_side(layouts[5], -1);
}

TEST_CASE("track pose runs entry to exit anchor")
{
  for (const TileLayout& layout : LayoutCatalog()) {
    const Pose2 at0 = LayoutTrackPose(layout, 0);
    CHECK(at0.x == doctest::Approx(0).epsilon(1e-12));
    CHECK(at0.y == doctest::Approx(0).epsilon(1e-12));
    CHECK(at0.heading == doctest::Approx(0).epsilon(1e-12));

    const Pose2 at_end = LayoutTrackPose(layout, layout.track_length);
    CHECK(at_end.x == doctest::Approx(layout.exit_anchor.x).epsilon(1e-12));
    CHECK(at_end.y == doctest::Approx(layout.exit_anchor.y).epsilon(1e-12));
    CHECK(at_end.heading == doctest::Approx(layout.exit_anchor.heading).epsilon(1e-12));
  }

  const TileLayout& straight = LayoutCatalog()[0];
  const Pose2 mid_straight = LayoutTrackPose(straight, 10);
  CHECK(mid_straight.x == doctest::Approx(10.0));
  CHECK(mid_straight.y == doctest::Approx(0.0));

  const TileLayout& left = LayoutCatalog()[1];
  const Pose2 mid = LayoutTrackPose(left, left.track_length / 2);
  CHECK(mid.heading == doctest::Approx(kPi / 4));
  CHECK(mid.x == doctest::Approx(kCurveRadius * std::sin(kPi / 4)));
  CHECK(mid.y == doctest::Approx(kCurveRadius * (1 - std::cos(kPi / 4))));

  const TileLayout& right = LayoutCatalog()[2];
  for (double s : {2.0, 9.0, 17.5}) {
    const Pose2 l = LayoutTrackPose(left, s);
    const Pose2 r = LayoutTrackPose(right, s);
    CHECK(r.x == doctest::Approx(l.x));
    CHECK(r.y == doctest::Approx(-l.y));
    CHECK(r.heading == doctest::Approx(-l.heading));
  }
}

TEST_CASE("footprint radii")
{
  CHECK(FootprintRadius(ObjectCategory::Building) == 6.0);
  CHECK(FootprintRadius(ObjectCategory::Tree) == 1.5);
  CHECK(FootprintRadius(ObjectCategory::Lamp) == 0.3);
  CHECK(FootprintRadius(ObjectCategory::Human) == 0.4);
  CHECK(FootprintRadius(ObjectCategory::Vehicle) == 2.2);
}

TEST_CASE("sub-sequence state resolves catalog-sized weight vectors")
{
  const auto schedule = SingleSchedule(10);
  const SubSequenceState state = BuildSubSequenceState(SeedPath(77), schedule, 0);
  for (int c = 0; c < kObjectCategoryCount; ++c) {
    CHECK(state.existence[c]);
    CHECK(state.entry_weights[c].size() ==
          BuiltinCatalog().categories[c].entries.size());
  }
  CHECK(state.straight_weights.size() == 1);
  CHECK(state.curve_weights.size() == 2);
  CHECK(state.crossing_weights.size() == 3);
}

TEST_CASE("populated tile honors counts, volumes and footprints")
{
  const auto schedule = SingleSchedule(10);
  const SeedPath root(9001);
  const SubSequenceState state = BuildSubSequenceState(root, schedule, 0);
  const auto& layouts = LayoutCatalog();

  for (int layout_index = 0; layout_index < 6; ++layout_index) {
    TileInstance tile;
    tile.index = 3 + layout_index;
    tile.layout = layout_index;
    PopulateTile(tile, root, schedule[0], state);

    std::array<int, kObjectCategoryCount> placed{};
    for (const PlacedEntity& e : tile.entities) {
      const int c = static_cast<int>(e.category);
      ++placed[c];
      CHECK(e.entry >= 0);
      CHECK(e.entry < static_cast<int>(state.entry_weights[c].size()));
      CHECK(e.footprint_radius == FootprintRadius(e.category));

      bool inside = false;
      for (const SpawnVolume& v : layouts[layout_index].volumes) {
        if (v.category == e.category && v.rect.Contains(e.pos)) inside = true;
      }
      CHECK(inside);

      if (e.category == ObjectCategory::Human) {
        CHECK(e.walk_phase >= 0.0);
        CHECK(e.walk_phase < 1.0);
        if (e.gait == Gait::Walk) {
          bool target_inside = false;
          for (const SpawnVolume& v : layouts[layout_index].volumes) {
            if (v.category == e.category && v.rect.Contains(e.walk_target)) target_inside = true;
          }
          CHECK(target_inside);
        } else {
          CHECK(e.walk_target.x == e.pos.x);
          CHECK(e.walk_target.y == e.pos.y);
        }
      }
      if (e.category == ObjectCategory::Vehicle) {
        CHECK(e.speed >= 2.0);
        CHECK(e.speed <= 14.0);
      }
    }

    for (int c = 0; c < kObjectCategoryCount; ++c) {
      CHECK(tile.sampled_counts[c] >= 0);
      CHECK(tile.sampled_counts[c] <= schedule[0].count_max[c]);
      CHECK(placed[c] + tile.dropped[c] == tile.sampled_counts[c]);
    }

    for (std::size_t i = 0; i < tile.entities.size(); ++i) {
      for (std::size_t j = i + 1; j < tile.entities.size(); ++j) {
        const PlacedEntity& a = tile.entities[i];
        const PlacedEntity& b = tile.entities[j];
        if (a.category != b.category) continue;
        CHECK(Length(a.pos - b.pos) >= a.footprint_radius + b.footprint_radius - 1e-12);
      }
    }
  }
}

TEST_CASE("tile population replays identically and varies with the tile index")
{
  const auto schedule = SingleSchedule(10);
  const SeedPath root(412);
  const SubSequenceState state = BuildSubSequenceState(root, schedule, 0);

  TileInstance a, b, c;
  a.index = b.index = 5;
  c.index = 6;
  a.layout = b.layout = c.layout = 0;
  PopulateTile(a, root, schedule[0], state);
  PopulateTile(b, root, schedule[0], state);
  PopulateTile(c, root, schedule[0], state);

  REQUIRE(a.entities.size() == b.entities.size());
  for (std::size_t i = 0; i < a.entities.size(); ++i) {
    CHECK(a.entities[i].pos.x == b.entities[i].pos.x);
    CHECK(a.entities[i].pos.y == b.entities[i].pos.y);
    CHECK(a.entities[i].entry == b.entities[i].entry);
  }

  bool differs = a.sampled_counts != c.sampled_counts || a.entities.size() != c.entities.size();
  for (std::size_t i = 0; !differs && i < a.entities.size(); ++i) {
    differs = a.entities[i].pos.x != c.entities[i].pos.x;
  }
  CHECK(differs);
}

TEST_CASE("excluded categories never place entities")
{
  auto schedule = SingleSchedule(10, {0, 0, 0, 0, 0});
  WorldWindow window(&schedule, SeedPath(5150), 7);
  for (const TileInstance& t : window.Active()) {
    CHECK(t.entities.empty());
    for (int c = 0; c < kObjectCategoryCount; ++c) CHECK(t.sampled_counts[c] == 0);
  }
}

TEST_CASE("crowded tiles drop overflow placements and account for them")
{
  auto schedule = SingleSchedule(400, {1, 0, 0, 0, 0});
  const SeedPath root(33);
  const SubSequenceState state = BuildSubSequenceState(root, schedule, 0);

  int total_dropped = 0;
  int total_placed = 0;
  for (int k = 0; k < 400; ++k) {
    TileInstance tile;
    tile.index = k;
    tile.layout = 0;
    PopulateTile(tile, root, schedule[0], state);
    const int b = static_cast<int>(ObjectCategory::Building);
    CHECK(static_cast<int>(tile.entities.size()) + tile.dropped[b] == tile.sampled_counts[b]);
    total_dropped += tile.dropped[b];
    total_placed += static_cast<int>(tile.entities.size());
  }
  // Four 12 m footprints rarely fit in two 22 m side strips, so rejection has
  // to trigger somewhere in 400 tiles.
  CHECK(total_dropped > 0);
  CHECK(total_placed > 0);
}

TEST_CASE("straight runs resample on a normal counter and families split evenly")
{
  auto schedule = SingleSchedule(130000, {0, 0, 0, 0, 0});
  WorldWindow window(&schedule, SeedPath(271828), 7);
  const std::vector<int> layouts = RecordLayouts(window, 120000);

  std::vector<int> runs;
  int curve_left = 0, curve_right = 0;
  std::array<int, 3> crossings{};
  int since_last = -1;  // -1 until the first non-straight bounds a run
  for (int id : layouts) {
    if (id == 0) {
      if (since_last >= 0) ++since_last;
      continue;
    }
    if (since_last >= 0) runs.push_back(since_last);
    since_last = 0;
    if (id == 1) ++curve_left;
    if (id == 2) ++curve_right;
    if (id >= 3) ++crossings[static_cast<std::size_t>(id - 3)];
  }
  const int curves = curve_left + curve_right;
  const int crossing_total = crossings[0] + crossings[1] + crossings[2];
  const double n_events = curves + crossing_total;
  REQUIRE(n_events > 10000);
  REQUIRE(runs.size() > 10000);

  // Family pick is a fair coin; kinds inside a family are uniform.
  const double sigma_half = std::sqrt(0.25 / n_events);
  CHECK(std::abs(curves / n_events - 0.5) < 3.5 * sigma_half);
  const double sigma_curve = std::sqrt(0.25 / curves);
  CHECK(std::abs(curve_left / static_cast<double>(curves) - 0.5) < 3.5 * sigma_curve);
  for (int c : crossings) {
    const double sigma_third = std::sqrt((1.0 / 3) * (2.0 / 3) / crossing_total);
    CHECK(std::abs(c / static_cast<double>(crossing_total) - 1.0 / 3) < 3.5 * sigma_third);
  }

  // Interior run lengths follow max(1, round(N(4, 0.45))).
  std::vector<double> run_d(runs.begin(), runs.end());
  CHECK(std::abs(Mean(run_d) - 4.0) < 0.1);

  const int kMaxBin = 9;
  std::vector<double> observed(kMaxBin + 1, 0.0);
  for (int r : runs) {
    REQUIRE(r >= 1);
    observed[static_cast<std::size_t>(std::min(r, kMaxBin))] += 1;
  }
  std::vector<double> expected(kMaxBin + 1, 0.0);
  for (int k = 1; k <= kMaxBin; ++k) {
    double lo = k == 1 ? -1e9 : (k - 0.5 - 4.0) / 0.45;
    double hi = k == kMaxBin ? 1e9 : (k + 0.5 - 4.0) / 0.45;
    expected[static_cast<std::size_t>(k)] =
        (NormalCdf(hi) - NormalCdf(lo)) * static_cast<double>(runs.size());
  }
  int dof = 0;
  const double chi2 = Chi2Stat(observed, expected, &dof);
  CHECK(Chi2PValue(chi2, dof) > 1e-3);
}

TEST_CASE("tiles chain entry to exit anchors")
{
  auto schedule = SingleSchedule(200);
  WorldWindow window(&schedule, SeedPath(66), 7);

  Pose2 expected;
  double expected_arc = 0;
  for (int cam = 0; cam < 100; ++cam) {
    window.Advance(cam);
    const TileInstance* t = window.TileAt(cam);
    REQUIRE(t != nullptr);
    CHECK(t->world_pose.x == doctest::Approx(expected.x).epsilon(1e-9));
    CHECK(t->world_pose.y == doctest::Approx(expected.y).epsilon(1e-9));
    CHECK(t->world_pose.heading == doctest::Approx(expected.heading).epsilon(1e-9));
    CHECK(t->arc_start == doctest::Approx(expected_arc).epsilon(1e-9));
    const TileLayout& layout = LayoutCatalog()[t->layout];
    expected = Compose(expected, layout.exit_anchor);
    expected_arc += layout.track_length;
  }
}

TEST_CASE("track pose is continuous across tile seams")
{
  auto schedule = SingleSchedule(200);
  WorldWindow window(&schedule, SeedPath(67), 7);
  for (int cam = 0; cam < 60; ++cam) {
    window.Advance(cam);
    const TileInstance* t = window.TileAt(cam + 2);
    REQUIRE(t != nullptr);
    const double seam = t->arc_start;
    const Pose2 before = window.TrackPoseAt(seam - 1e-7);
    const Pose2 after = window.TrackPoseAt(seam + 1e-7);
    CHECK(std::abs(before.x - after.x) < 1e-5);
    CHECK(std::abs(before.y - after.y) < 1e-5);
    CHECK(std::abs(std::sin(before.heading - after.heading)) < 1e-5);
    CHECK(std::cos(before.heading - after.heading) > 0);
  }
}

TEST_CASE("window keeps one tile behind the camera and spawns ahead")
{
  auto schedule = SingleSchedule(40);
  WorldWindow window(&schedule, SeedPath(1234), 7);

  REQUIRE(window.Active().size() == 7);
  CHECK(window.Active().front().index == 0);
  CHECK(window.Active().back().index == 6);
  CHECK(window.SpawnedCount() == 7);

  window.Advance(5);
  REQUIRE(window.Active().size() == 7);
  CHECK(window.Active().front().index == 4);
  CHECK(window.Active().back().index == 10);
  CHECK(window.SpawnedCount() == 11);

  window.Advance(5);
  CHECK(window.Active().front().index == 4);
  CHECK(window.Active().back().index == 10);

  window.Advance(6);
  CHECK(window.Active().front().index == 5);
  CHECK(window.Active().back().index == 11);

  int prev = window.Active().front().index - 1;
  for (const TileInstance& t : window.Active()) {
    CHECK(t.index == prev + 1);
    prev = t.index;
  }
}

TEST_CASE("tile ownership follows the schedule and clamps past its end")
{
  std::vector<SubSequenceParams> schedule;
  SubSequenceParams a;
  a.n_tiles = 5;
  a.existence_probs = {0, 0, 0, 0, 0};
  SubSequenceParams b;
  b.n_tiles = 5;
  schedule.push_back(a);
  schedule.push_back(b);

  WorldWindow window(&schedule, SeedPath(31337), 7);
  CHECK(window.TotalScheduledTiles() == 10);
  CHECK(window.SubseqOfTile(0) == 0);
  CHECK(window.SubseqOfTile(4) == 0);
  CHECK(window.SubseqOfTile(5) == 1);
  CHECK(window.SubseqOfTile(9) == 1);
  CHECK(window.SubseqOfTile(10) == 1);
  CHECK(window.SubseqOfTile(500) == 1);

  int first_half_entities = 0;
  int second_half_entities = 0;
  for (int cam = 0; cam < 12; ++cam) {
    window.Advance(cam);
    const TileInstance* t = window.TileAt(cam);
    REQUIRE(t != nullptr);
    CHECK(t->subseq == window.SubseqOfTile(cam));
    if (t->index < 5) {
      first_half_entities += static_cast<int>(t->entities.size());
    } else {
      second_half_entities += static_cast<int>(t->entities.size());
    }
  }
  CHECK(first_half_entities == 0);
  CHECK(second_half_entities > 0);
}

TEST_CASE("vehicle spawns project onto the track")
{
  auto schedule = SingleSchedule(60, {0, 0, 0, 0, 1});
  WorldWindow window(&schedule, SeedPath(808), 7);

  int entity_vehicles = 0;
  for (const TileInstance& t : window.Active()) {
    entity_vehicles += static_cast<int>(t.entities.size());
  }
  const auto spawns = window.TakeVehicleSpawns();
  CHECK(static_cast<int>(spawns.size()) == entity_vehicles);
  CHECK(window.TakeVehicleSpawns().empty());

  for (const VehicleSpawn& s : spawns) {
    CHECK(s.arc >= 0.0);
    CHECK(s.arc <= window.TrackEndArc());
    CHECK(std::abs(s.lateral) <= 2.5);
    CHECK(s.speed >= 2.0);
    CHECK(s.speed <= 14.0);
  }

  window.Advance(20);
  const auto more = window.TakeVehicleSpawns();
  int later_vehicles = 0;
  for (const TileInstance& t : window.Active()) {
    if (t.index >= 7) later_vehicles += static_cast<int>(t.entities.size());
  }
  CHECK(static_cast<int>(more.size()) == later_vehicles);
}

TEST_CASE("track arc queries clamp to the active window")
{
  auto schedule = SingleSchedule(50, {0, 0, 0, 0, 0});
  WorldWindow window(&schedule, SeedPath(99), 7);
  window.Advance(10);

  double s = -1;
  const TileInstance* front = window.TileContaining(-5.0, &s);
  REQUIRE(front != nullptr);
  CHECK(front->index == window.Active().front().index);
  CHECK(s == 0.0);

  const TileInstance* back = window.TileContaining(window.TrackEndArc() + 50.0, &s);
  REQUIRE(back != nullptr);
  CHECK(back->index == window.Active().back().index);
  CHECK(s == doctest::Approx(LayoutCatalog()[back->layout].track_length));

  const TileInstance* mid = window.TileAt(11);
  REQUIRE(mid != nullptr);
  const TileInstance* found = window.TileContaining(mid->arc_start + 0.25, &s);
  REQUIRE(found != nullptr);
  CHECK(found->index == 11);
  CHECK(s == doctest::Approx(0.25));
}

TEST_CASE("windows replay identically for equal seeds and diverge across seeds")
{
  auto schedule = SingleSchedule(80);
  WorldWindow a(&schedule, SeedPath(2024), 7);
  WorldWindow b(&schedule, SeedPath(2024), 7);
  WorldWindow c(&schedule, SeedPath(2025), 7);

  bool any_difference_c = false;
  for (int cam = 0; cam < 50; ++cam) {
    a.Advance(cam);
    b.Advance(cam);
    c.Advance(cam);
    const TileInstance* ta = a.TileAt(cam);
    const TileInstance* tb = b.TileAt(cam);
    const TileInstance* tc = c.TileAt(cam);
    REQUIRE(ta != nullptr);
    REQUIRE(tb != nullptr);
    REQUIRE(tc != nullptr);

    CHECK(ta->layout == tb->layout);
    REQUIRE(ta->entities.size() == tb->entities.size());
    for (std::size_t i = 0; i < ta->entities.size(); ++i) {
      CHECK(ta->entities[i].pos.x == tb->entities[i].pos.x);
      CHECK(ta->entities[i].pos.y == tb->entities[i].pos.y);
      CHECK(ta->entities[i].heading == tb->entities[i].heading);
      CHECK(ta->entities[i].entry == tb->entities[i].entry);
    }

    if (ta->layout != tc->layout || ta->entities.size() != tc->entities.size()) {
      any_difference_c = true;
    }
  }
  CHECK(any_difference_c);

  const auto va = a.TakeVehicleSpawns();
  const auto vb = b.TakeVehicleSpawns();
  REQUIRE(va.size() == vb.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    CHECK(va[i].arc == vb[i].arc);
    CHECK(va[i].lateral == vb[i].lateral);
    CHECK(va[i].speed == vb[i].speed);
  }
}
