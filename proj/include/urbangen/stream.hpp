#pragma once

#include <functional>
#include <string>
#include <vector>

#include "urbangen/config.hpp"
#include "urbangen/extractor.hpp"
#include "urbangen/renderer.hpp"

namespace urbangen {

// Optional per-patch preprocessing; transformed patches are written beside the
// originals, never instead of them.
enum class PatchTransform { None = 0, ColorRatio = 1, Lbp = 2 };

struct StreamRunOptions {
  // Write every frame's enabled planes to disk. Off, only captured frames are
  // rendered at all, which is the cheap path for patch-dataset generation.
  bool emit_frames = false;
  bool emit_patches = true;
  PatchTransform transform = PatchTransform::None;
  int threads = 1;
  // Stop after this many camera frames; 0 runs the whole schedule.
  long max_frames = 0;
  // Wall-clock timing goes to this JSON file when set. It is kept out of the
  // manifest so output trees are byte-comparable across machines and runs.
  std::string timing_path;
  // Called for every captured frame after rendering, before encoding, with the
  // duplicate verdict for that frame. Diagnostics hook; default is none.
  std::function<void(const FrameSet&, bool duplicate)> observer;
};

struct StreamResult {
  long frames_total = 0;        // camera frames advanced (rendered or not)
  long frames_captured = 0;     // frames at the capture stride
  long frames_written = 0;      // frame sets encoded to disk
  long patches_written = 0;
  long duplicates_skipped = 0;  // captured frames whose color bytes repeated
  ExtractionCounters extraction;
  double render_seconds = 0;    // time inside RenderFrame
  double total_seconds = 0;
  std::string manifest_path;
};

// Runs the configured stream end to end: simulates at a fixed 120 Hz subtick
// rate, renders at the camera frame rate, captures every capture_stride-th
// frame, extracts and writes patches, and records everything in a JSON-lines
// manifest under output_root. The manifest and all referenced artifacts are a
// pure function of (config, seed); thread count and timing options only change
// how fast they appear. Throws std::runtime_error with path context on I/O
// failure.
StreamResult RunStream(const StreamConfig& config, const std::string& output_root,
                       const StreamRunOptions& options);

// Writes the enabled planes of one frame under root as
// {mode}/{tt}_{ffffff}.png using the frame's own meta indices; returns the
// relative paths written, in color, semantic, depth, normal order.
std::vector<std::string> WriteFrameSet(const FrameSet& frame, const RenderModes& modes,
                                       const std::string& root);

}  // namespace urbangen
