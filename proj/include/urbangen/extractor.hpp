#pragma once

#include <cstdint>
#include <vector>

#include "urbangen/image.hpp"
#include "urbangen/random.hpp"
#include "urbangen/renderer.hpp"

namespace urbangen {

// Axis-aligned pixel rectangle with its class and source entity. Background
// boxes carry instance_id 0 and the background label.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  std::uint8_t label = 0;
  std::uint16_t instance_id = 0;
};

struct ExtractionRules {
  int min_side = 32;          // boxes with min(w, h) below this are dropped
  double overlap_max = 0.20;  // of the box's own area, against other foreground boxes
  int bg_boxes_per_frame = 4;
  int bg_size_lo = 64;
  int bg_size_hi = 200;
  int bg_reject_attempts = 16;  // per background slot
  int resize_to = 64;
};

// One emitted classification patch: the resized square crop plus everything
// needed to re-derive it from the stored frame.
struct PatchRecord {
  ImageU8 image;  // resize_to x resize_to RGB
  std::uint8_t label = 0;
  BoundingBox box;   // generating box in frame coordinates
  int crop_x = 0;    // top-left of the clamped square crop
  int crop_y = 0;
  int crop_side = 0;
};

// Per-frame bookkeeping of why boxes were not emitted.
struct ExtractionCounters {
  int boxes_total = 0;
  int dropped_small = 0;
  int dropped_overlap = 0;
  int bg_slots_skipped = 0;
  int emitted = 0;
};

// Tight boxes of the foreground classes (tree, lamp, human, vehicle), one per
// instance id present in the buffers, ordered by ascending instance id. The
// label is read off the instance's pixels.
std::vector<BoundingBox> BoxesFromMask(const ImageU8& semantic,
                                       const std::vector<std::uint16_t>& instance);

// Up to bg_boxes_per_frame boxes with both dimensions uniform in
// [bg_size_lo, bg_size_hi] and uniform in-frame position. A candidate touching
// any foreground box (or exceeding the frame) fails the attempt; a slot is
// skipped after bg_reject_attempts failures. Each attempt draws w, h and, when
// the size fits the frame, x, y, in that order.
std::vector<BoundingBox> SampleBackgroundBoxes(int width, int height,
                                               const std::vector<BoundingBox>& foreground,
                                               const ExtractionRules& rules, RandomSource& src);

// True iff the color buffers carry identical bytes.
bool IsDuplicateFrame(const FrameSet& current, const FrameSet& previous);

// Bilinear resample of an RGB crop onto out_side x out_side. Source coordinate
// of output pixel i is (i + 0.5) * side / out_side - 0.5, clamped.
ImageU8 ResizePatch(const ImageU8& crop, int out_side);

// Full per-frame pipeline: tight foreground boxes, background sampling, the
// size filter (min side), the pairwise overlap filter (intersection over own
// area, strictly above overlap_max drops the box), square crops of side
// max(w, h) centered on the box and shifted inward at frame edges (side capped
// at the frame's smaller dimension), and the resize. Background boxes skip the
// size and overlap filters; they were sampled against every foreground box.
std::vector<PatchRecord> ExtractPatches(const FrameSet& frame, const ExtractionRules& rules,
                                        RandomSource& src, ExtractionCounters* counters = nullptr);

}  // namespace urbangen
