#include "urbangen/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace urbangen {

namespace {

bool Intersects(const BoundingBox& a, const BoundingBox& b)
{
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

long IntersectionArea(const BoundingBox& a, const BoundingBox& b)
{
  const long w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const long h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  return w > 0 && h > 0 ? w * h : 0;
}

}  // namespace

std::vector<BoundingBox> BoxesFromMask(const ImageU8& semantic,
                                       const std::vector<std::uint16_t>& instance)
{
  struct Extent {
    int min_x, min_y, max_x, max_y;
    std::uint8_t label;
  };
  std::map<std::uint16_t, Extent> extents;
  const int w = semantic.width;
  const int h = semantic.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint16_t id = instance[static_cast<std::size_t>(y) * w + x];
      if (id == kNoInstance) continue;
      const std::uint8_t label = semantic.At(x, y);
      if (label != kLabelTree && label != kLabelLamp && label != kLabelHuman &&
          label != kLabelVehicle) {
        continue;
      }
      auto it = extents.find(id);
      if (it == extents.end()) {
        extents.emplace(id, Extent{x, y, x, y, label});
      } else {
        Extent& e = it->second;
        e.min_x = std::min(e.min_x, x);
        e.min_y = std::min(e.min_y, y);
        e.max_x = std::max(e.max_x, x);
        e.max_y = std::max(e.max_y, y);
      }
    }
  }
  std::vector<BoundingBox> boxes;
  boxes.reserve(extents.size());
  for (const auto& [id, e] : extents) {
    BoundingBox b;
    b.x = e.min_x;
    b.y = e.min_y;
    b.w = e.max_x - e.min_x + 1;
    b.h = e.max_y - e.min_y + 1;
    b.label = e.label;
    b.instance_id = id;
    boxes.push_back(b);
  }
  return boxes;
}

std::vector<BoundingBox> SampleBackgroundBoxes(int width, int height,
                                               const std::vector<BoundingBox>& foreground,
                                               const ExtractionRules& rules, RandomSource& src)
{
  std::vector<BoundingBox> out;
  for (int slot = 0; slot < rules.bg_boxes_per_frame; ++slot) {
    for (int attempt = 0; attempt < rules.bg_reject_attempts; ++attempt) {
      BoundingBox b;
      b.w = SampleUniformInt(src, rules.bg_size_lo, rules.bg_size_hi);
      b.h = SampleUniformInt(src, rules.bg_size_lo, rules.bg_size_hi);
      if (b.w > width || b.h > height) continue;
      b.x = SampleUniformInt(src, 0, width - b.w);
      b.y = SampleUniformInt(src, 0, height - b.h);
      b.label = kLabelBackground;
      b.instance_id = kNoInstance;
      bool collides = false;
      for (const BoundingBox& f : foreground) {
        if (Intersects(b, f)) {
          collides = true;
          break;
        }
      }
      if (!collides) {
        out.push_back(b);
        break;
      }
    }
  }
  return out;
}

bool IsDuplicateFrame(const FrameSet& current, const FrameSet& previous)
{
  return current.color.width == previous.color.width &&
         current.color.height == previous.color.height &&
         current.color.data == previous.color.data;
}

ImageU8 ResizePatch(const ImageU8& crop, int out_side)
{
  ImageU8 out(out_side, out_side, crop.channels);
  const double sx_scale = static_cast<double>(crop.width) / out_side;
  const double sy_scale = static_cast<double>(crop.height) / out_side;
  for (int y = 0; y < out_side; ++y) {
    double sy = (y + 0.5) * sy_scale - 0.5;
    sy = std::min(std::max(sy, 0.0), static_cast<double>(crop.height - 1));
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, crop.height - 1);
    const double dy = sy - y0;
    for (int x = 0; x < out_side; ++x) {
      double sx = (x + 0.5) * sx_scale - 0.5;
      sx = std::min(std::max(sx, 0.0), static_cast<double>(crop.width - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, crop.width - 1);
      const double dx = sx - x0;
      for (int c = 0; c < crop.channels; ++c) {
        const double v = (1 - dx) * (1 - dy) * crop.At(x0, y0, c) +
                         dx * (1 - dy) * crop.At(x1, y0, c) +
                         (1 - dx) * dy * crop.At(x0, y1, c) + dx * dy * crop.At(x1, y1, c);
        out.At(x, y, c) = static_cast<std::uint8_t>(std::lround(std::min(std::max(v, 0.0), 255.0)));
      }
    }
  }
  return out;
}

std::vector<PatchRecord> ExtractPatches(const FrameSet& frame, const ExtractionRules& rules,
                                        RandomSource& src, ExtractionCounters* counters)
{
  ExtractionCounters local;
  ExtractionCounters& c = counters ? *counters : local;
  c = ExtractionCounters{};

  const std::vector<BoundingBox> foreground = BoxesFromMask(frame.semantic, frame.instance);
  const std::vector<BoundingBox> background =
      SampleBackgroundBoxes(frame.width, frame.height, foreground, rules, src);
  c.bg_slots_skipped = rules.bg_boxes_per_frame - static_cast<int>(background.size());
  c.boxes_total = static_cast<int>(foreground.size() + background.size());

  std::vector<BoundingBox> kept;
  kept.reserve(foreground.size() + background.size());
  for (std::size_t i = 0; i < foreground.size(); ++i) {
    const BoundingBox& b = foreground[i];
    if (std::min(b.w, b.h) < rules.min_side) {
      ++c.dropped_small;
      continue;
    }
    const double own_area = static_cast<double>(b.w) * b.h;
    bool crowded = false;
    for (std::size_t j = 0; j < foreground.size(); ++j) {
      if (j == i) continue;
      if (IntersectionArea(b, foreground[j]) > rules.overlap_max * own_area) {
        crowded = true;
        break;
      }
    }
    if (crowded) {
      ++c.dropped_overlap;
      continue;
    }
    kept.push_back(b);
  }
  kept.insert(kept.end(), background.begin(), background.end());

  std::vector<PatchRecord> patches;
  patches.reserve(kept.size());
  for (const BoundingBox& b : kept) {
    int side = std::max(b.w, b.h);
    side = std::min({side, frame.width, frame.height});
    int cx = b.x + (b.w - side) / 2;
    int cy = b.y + (b.h - side) / 2;
    cx = std::min(std::max(cx, 0), frame.width - side);
    cy = std::min(std::max(cy, 0), frame.height - side);

    ImageU8 crop(side, side, 3);
    for (int y = 0; y < side; ++y) {
      const std::uint8_t* row = &frame.color.data[(static_cast<std::size_t>(cy + y) * frame.width + cx) * 3];
      std::copy(row, row + static_cast<std::size_t>(side) * 3,
                &crop.data[static_cast<std::size_t>(y) * side * 3]);
    }

    PatchRecord rec;
    rec.image = side == rules.resize_to ? std::move(crop) : ResizePatch(crop, rules.resize_to);
    rec.label = b.label;
    rec.box = b;
    rec.crop_x = cx;
    rec.crop_y = cy;
    rec.crop_side = side;
    patches.push_back(std::move(rec));
    ++c.emitted;
  }
  return patches;
}

}  // namespace urbangen
