#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "statutil.hpp"
#include "urbangen/extractor.hpp"
#include "urbangen/random.hpp"

using namespace urbangen;

namespace {

FrameSet BlankFrame(int w, int h)
{
  FrameSet f;
  f.width = w;
  f.height = h;
  f.color = ImageU8(w, h, 3);
  f.semantic = ImageU8(w, h, 1);
  f.depth = ImageU16(w, h);
  f.normal = ImageU8(w, h, 3);
  f.instance.assign(static_cast<std::size_t>(w) * h, kNoInstance);
  return f;
}

void PaintBlob(FrameSet& f, int x, int y, int w, int h, std::uint8_t label, std::uint16_t id)
{
  for (int yy = y; yy < y + h; ++yy) {
    for (int xx = x; xx < x + w; ++xx) {
      f.semantic.At(xx, yy) = label;
      f.instance[static_cast<std::size_t>(yy) * f.width + xx] = id;
    }
  }
}

bool Intersects(const BoundingBox& a, const BoundingBox& b)
{
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

}  // namespace

TEST_CASE("tight box around a single rectangular blob")
{
  FrameSet f = BlankFrame(320, 240);
  PaintBlob(f, 100, 50, 10, 20, kLabelTree, 7);
  const std::vector<BoundingBox> boxes = BoxesFromMask(f.semantic, f.instance);
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0].x == 100);
  CHECK(boxes[0].y == 50);
  CHECK(boxes[0].w == 10);
  CHECK(boxes[0].h == 20);
  CHECK(boxes[0].label == kLabelTree);
  CHECK(boxes[0].instance_id == 7);
}

TEST_CASE("empty foreground yields no boxes")
{
  FrameSet f = BlankFrame(64, 64);
  CHECK(BoxesFromMask(f.semantic, f.instance).empty());
}

TEST_CASE("disjoint instances produce boxes that exactly cover their pixels")
{
  FrameSet f = BlankFrame(300, 200);
  PaintBlob(f, 10, 10, 40, 12, kLabelHuman, 3);
  PaintBlob(f, 90, 40, 8, 50, kLabelVehicle, 5);
  PaintBlob(f, 200, 100, 25, 25, kLabelLamp, 11);
  // An L-shaped instance: the box must be tight over the union of both arms.
  PaintBlob(f, 250, 10, 5, 30, kLabelTree, 20);
  PaintBlob(f, 250, 35, 20, 5, kLabelTree, 20);
  const std::vector<BoundingBox> boxes = BoxesFromMask(f.semantic, f.instance);
  REQUIRE(boxes.size() == 4);
  // Ascending instance-id order.
  CHECK(boxes[0].instance_id == 3);
  CHECK(boxes[1].instance_id == 5);
  CHECK(boxes[2].instance_id == 11);
  CHECK(boxes[3].instance_id == 20);

  // Pixel-scan oracle: every labeled pixel falls inside its instance's box and
  // every box edge is touched by at least one pixel of the instance.
  std::map<std::uint16_t, BoundingBox> by_id;
  for (const BoundingBox& b : boxes) by_id[b.instance_id] = b;
  std::map<std::uint16_t, std::array<int, 4>> extremes;  // minx, miny, maxx, maxy
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      const std::uint16_t id = f.instance[static_cast<std::size_t>(y) * f.width + x];
      if (id == kNoInstance) continue;
      REQUIRE(by_id.count(id) == 1);
      const BoundingBox& b = by_id[id];
      REQUIRE(x >= b.x);
      REQUIRE(x < b.x + b.w);
      REQUIRE(y >= b.y);
      REQUIRE(y < b.y + b.h);
      auto it = extremes.find(id);
      if (it == extremes.end()) {
        extremes[id] = {x, y, x, y};
      } else {
        it->second[0] = std::min(it->second[0], x);
        it->second[1] = std::min(it->second[1], y);
        it->second[2] = std::max(it->second[2], x);
        it->second[3] = std::max(it->second[3], y);
      }
    }
  }
  for (const BoundingBox& b : boxes) {
    const auto& e = extremes[b.instance_id];
    CHECK(e[0] == b.x);
    CHECK(e[1] == b.y);
    CHECK(e[2] == b.x + b.w - 1);
    CHECK(e[3] == b.y + b.h - 1);
  }
}

TEST_CASE("background pixels with labels of the backdrop classes produce no boxes")
{
  FrameSet f = BlankFrame(64, 64);
  // Street/building pixels share the background label and id 0.
  for (int x = 0; x < 64; ++x) f.semantic.At(x, 30) = kLabelBackground;
  for (int x = 0; x < 64; ++x) f.semantic.At(x, 10) = kLabelSky;
  CHECK(BoxesFromMask(f.semantic, f.instance).empty());
}

TEST_CASE("background sampling fills all slots on an empty frame")
{
  RandomSource src(0xb6001u);
  ExtractionRules rules;
  const std::vector<BoundingBox> bg =
      SampleBackgroundBoxes(960, 540, {}, rules, src);
  REQUIRE(bg.size() == 4);
  for (const BoundingBox& b : bg) {
    CHECK(b.w >= 64);
    CHECK(b.w <= 200);
    CHECK(b.h >= 64);
    CHECK(b.h <= 200);
    CHECK(b.x >= 0);
    CHECK(b.y >= 0);
    CHECK(b.x + b.w <= 960);
    CHECK(b.y + b.h <= 540);
    CHECK(b.label == kLabelBackground);
    CHECK(b.instance_id == kNoInstance);
  }
}

TEST_CASE("background sampling rejects everything under a frame-filling foreground box")
{
  RandomSource src(0xb6002u);
  ExtractionRules rules;
  std::vector<BoundingBox> fg = {{0, 0, 960, 540, kLabelVehicle, 1}};
  CHECK(SampleBackgroundBoxes(960, 540, fg, rules, src).empty());
}

TEST_CASE("background boxes never touch any foreground box")
{
  ExtractionRules rules;
  std::vector<BoundingBox> fg = {{100, 100, 220, 180, kLabelVehicle, 1},
                                 {600, 50, 90, 300, kLabelTree, 2},
                                 {400, 400, 180, 100, kLabelHuman, 3}};
  int produced = 0;
  for (int i = 0; i < 300; ++i) {
    RandomSource src(0xb6100u + i);
    for (const BoundingBox& b : SampleBackgroundBoxes(960, 540, fg, rules, src)) {
      ++produced;
      for (const BoundingBox& f : fg) CHECK(!Intersects(b, f));
    }
  }
  CHECK(produced > 300);
}

TEST_CASE("background dimensions are uniform over the configured range")
{
  ExtractionRules rules;
  RandomSource src(0xb6200u);
  // 10 bins over 64..200 (137 values); chi-square against the uniform law.
  std::vector<double> observed(10, 0);
  int n = 0;
  while (n < 10000) {
    for (const BoundingBox& b : SampleBackgroundBoxes(2000, 2000, {}, rules, src)) {
      const int bin = std::min(9, (b.w - 64) * 10 / 137);
      observed[static_cast<std::size_t>(bin)] += 1;
      ++n;
    }
  }
  std::vector<double> expected(10, 0);
  for (int v = 64; v <= 200; ++v) expected[static_cast<std::size_t>(std::min(9, (v - 64) * 10 / 137))] += n / 137.0;
  int dof = 0;
  const double chi2 = statutil::Chi2Stat(observed, expected, &dof);
  CHECK(statutil::Chi2PValue(chi2, dof) > 1e-3);
}

TEST_CASE("duplicate detection compares color bytes only")
{
  FrameSet a = BlankFrame(32, 32);
  FrameSet b = BlankFrame(32, 32);
  CHECK(IsDuplicateFrame(a, a));
  CHECK(IsDuplicateFrame(a, b));
  b.depth.At(4, 4) = 777;  // depth differences alone do not break duplication
  CHECK(IsDuplicateFrame(a, b));
  b.color.At(5, 5, 1) = 1;
  CHECK(!IsDuplicateFrame(a, b));
}

TEST_CASE("patch resize: constants stay constant and values interpolate")
{
  ImageU8 crop(2, 2, 3);
  for (std::uint8_t& v : crop.data) v = 90;
  const ImageU8 up = ResizePatch(crop, 8);
  REQUIRE(up.width == 8);
  REQUIRE(up.height == 8);
  for (const std::uint8_t v : up.data) CHECK(v == 90);

  // Horizontal ramp: left column 0, right column 200. Output pixel x samples
  // source coordinate (x + 0.5) * 2 / 4 - 0.5; interpolating the ramp gives
  // 0, 50, 150, 200 across the row (clamped at the borders).
  ImageU8 ramp(2, 1, 3);
  ramp.At(1, 0, 0) = ramp.At(1, 0, 1) = ramp.At(1, 0, 2) = 200;
  const ImageU8 wide = ResizePatch(ramp, 4);
  CHECK(wide.At(0, 0, 0) == 0);
  CHECK(wide.At(1, 0, 0) == 50);
  CHECK(wide.At(2, 0, 0) == 150);
  CHECK(wide.At(3, 0, 0) == 200);
}

TEST_CASE("square crops center on the box and clamp inward at frame edges")
{
  FrameSet f = BlankFrame(960, 540);
  // 100x40 box away from every edge: crop side 100 centered on the box.
  PaintBlob(f, 300, 200, 100, 40, kLabelVehicle, 2);
  // Near the left edge: the 80-wide square cannot extend past x = 0.
  PaintBlob(f, 4, 250, 35, 80, kLabelHuman, 9);
  ExtractionRules rules;
  RandomSource src(0xb6300u);
  ExtractionCounters counters;
  const std::vector<PatchRecord> patches = ExtractPatches(f, rules, src, &counters);
  REQUIRE(patches.size() >= 2);
  const PatchRecord* vehicle = nullptr;
  const PatchRecord* human = nullptr;
  for (const PatchRecord& p : patches) {
    if (p.box.instance_id == 2) vehicle = &p;
    if (p.box.instance_id == 9) human = &p;
  }
  REQUIRE(vehicle != nullptr);
  REQUIRE(human != nullptr);
  CHECK(vehicle->crop_side == 100);
  CHECK(vehicle->crop_x == 300);         // centered: 300 + 100/2 - 100/2
  CHECK(vehicle->crop_y == 200 + 40 / 2 - 100 / 2);
  CHECK(vehicle->image.width == 64);
  CHECK(vehicle->image.height == 64);
  CHECK(human->crop_side == 80);
  CHECK(human->crop_x == 0);             // ideal -21 clamps to the frame
  CHECK(human->crop_y == 250 + 80 / 2 - 80 / 2);
  CHECK(counters.emitted == static_cast<int>(patches.size()));
}

TEST_CASE("size filter: 31 pixel minimum side drops, 32 keeps")
{
  FrameSet f = BlankFrame(960, 540);
  PaintBlob(f, 100, 100, 31, 80, kLabelTree, 1);
  PaintBlob(f, 400, 100, 32, 80, kLabelTree, 2);
  ExtractionRules rules;
  RandomSource src(0xb6400u);
  ExtractionCounters counters;
  const std::vector<PatchRecord> patches = ExtractPatches(f, rules, src, &counters);
  bool saw1 = false, saw2 = false;
  for (const PatchRecord& p : patches) {
    if (p.box.instance_id == 1) saw1 = true;
    if (p.box.instance_id == 2) saw2 = true;
  }
  CHECK(!saw1);
  CHECK(saw2);
  CHECK(counters.dropped_small == 1);
}

TEST_CASE("overlap filter: 30 percent drops both, 10 percent keeps both")
{
  ExtractionRules rules;
  // Two 50x50 boxes overlapping 30% of each: 50x30 shared region over area 2500.
  {
    FrameSet f = BlankFrame(960, 540);
    PaintBlob(f, 100, 100, 50, 50, kLabelHuman, 1);
    PaintBlob(f, 100, 135, 50, 50, kLabelHuman, 2);
    // The blobs merge in the mask; paint the second over the first, then force
    // tight boxes by synthesizing the expected rectangles directly. The filter
    // operates on boxes, so feed a synthetic pair through ExtractPatches by
    // keeping the pixels disjoint but the boxes overlapping: two L-shapes.
    f = BlankFrame(960, 540);
    // Instance 1 occupies the top edge row and left column of its box.
    PaintBlob(f, 100, 100, 50, 1, kLabelHuman, 1);
    PaintBlob(f, 100, 100, 1, 50, kLabelHuman, 1);
    // Instance 2 the bottom edge row and right column of its box.
    PaintBlob(f, 100, 184, 50, 1, kLabelHuman, 2);
    PaintBlob(f, 149, 135, 1, 50, kLabelHuman, 2);
    RandomSource src(0xb6500u);
    ExtractionCounters counters;
    const std::vector<PatchRecord> patches = ExtractPatches(f, rules, src, &counters);
    for (const PatchRecord& p : patches) {
      CHECK(p.box.instance_id != 1);
      CHECK(p.box.instance_id != 2);
    }
    CHECK(counters.dropped_overlap == 2);
  }
  {
    FrameSet f = BlankFrame(960, 540);
    // Boxes 50x50 at y offset 45: shared region 50x5 = 250 px = 10% of 2500.
    PaintBlob(f, 100, 100, 50, 1, kLabelHuman, 1);
    PaintBlob(f, 100, 100, 1, 50, kLabelHuman, 1);
    PaintBlob(f, 100, 194, 50, 1, kLabelHuman, 2);
    PaintBlob(f, 149, 145, 1, 50, kLabelHuman, 2);
    RandomSource src(0xb6501u);
    ExtractionCounters counters;
    const std::vector<PatchRecord> patches = ExtractPatches(f, rules, src, &counters);
    bool saw1 = false, saw2 = false;
    for (const PatchRecord& p : patches) {
      if (p.box.instance_id == 1) saw1 = true;
      if (p.box.instance_id == 2) saw2 = true;
    }
    CHECK(saw1);
    CHECK(saw2);
    CHECK(counters.dropped_overlap == 0);
  }
}

TEST_CASE("asymmetric overlap can drop the smaller box alone")
{
  // Small 40x40 box fully against a 200x200 box: intersection 40x40 is 100% of
  // the small box's area but 4% of the large one's.
  FrameSet f = BlankFrame(960, 540);
  PaintBlob(f, 100, 100, 200, 1, kLabelVehicle, 1);
  PaintBlob(f, 100, 100, 1, 200, kLabelVehicle, 1);
  PaintBlob(f, 299, 100, 1, 200, kLabelVehicle, 1);
  PaintBlob(f, 150, 150, 40, 40, kLabelHuman, 2);
  ExtractionRules rules;
  RandomSource src(0xb6600u);
  ExtractionCounters counters;
  const std::vector<PatchRecord> patches = ExtractPatches(f, rules, src, &counters);
  bool saw1 = false, saw2 = false;
  for (const PatchRecord& p : patches) {
    if (p.box.instance_id == 1) saw1 = true;
    if (p.box.instance_id == 2) saw2 = true;
  }
  CHECK(saw1);
  CHECK(!saw2);
  CHECK(counters.dropped_overlap == 1);
}

TEST_CASE("patch pixels come from the frame's color buffer")
{
  FrameSet f = BlankFrame(960, 540);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      f.color.At(x, y, 0) = static_cast<std::uint8_t>(x % 251);
      f.color.At(x, y, 1) = static_cast<std::uint8_t>(y % 249);
      f.color.At(x, y, 2) = 33;
    }
  PaintBlob(f, 300, 200, 64, 64, kLabelVehicle, 2);
  ExtractionRules rules;
  rules.bg_boxes_per_frame = 0;
  RandomSource src(0xb6700u);
  const std::vector<PatchRecord> patches = ExtractPatches(f, rules, src, nullptr);
  REQUIRE(patches.size() == 1);
  // 64x64 crop resized to 64: the identity resample of the crop region.
  const PatchRecord& p = patches[0];
  REQUIRE(p.crop_side == 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      REQUIRE(p.image.At(x, y, 0) == f.color.At(p.crop_x + x, p.crop_y + y, 0));
      REQUIRE(p.image.At(x, y, 1) == f.color.At(p.crop_x + x, p.crop_y + y, 1));
      REQUIRE(p.image.At(x, y, 2) == 33);
    }
}

TEST_CASE("extraction is a pure function of frame and seed")
{
  FrameSet f = BlankFrame(960, 540);
  PaintBlob(f, 120, 80, 70, 90, kLabelTree, 4);
  PaintBlob(f, 500, 300, 45, 120, kLabelHuman, 6);
  ExtractionRules rules;
  RandomSource a(0xb6800u);
  RandomSource b(0xb6800u);
  const std::vector<PatchRecord> pa = ExtractPatches(f, rules, a, nullptr);
  const std::vector<PatchRecord> pb = ExtractPatches(f, rules, b, nullptr);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].image.data == pb[i].image.data);
    CHECK(pa[i].box.x == pb[i].box.x);
    CHECK(pa[i].crop_x == pb[i].crop_x);
    CHECK(pa[i].label == pb[i].label);
  }
}
