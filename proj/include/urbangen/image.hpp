#pragma once

#include <cstdint>
#include <vector>

namespace urbangen {

// Interleaved 8-bit image; channels is 1 (gray) or 3 (RGB).
struct ImageU8 {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  ImageU8() = default;
  ImageU8(int w, int h, int c) : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c) {}

  std::uint8_t& At(int x, int y, int c = 0)
  {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t At(int x, int y, int c = 0) const
  {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

struct ImageU16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  ImageU16() = default;
  ImageU16(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h) {}

  std::uint16_t& At(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t At(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Double-precision planes for the photometric transforms; interpolation
// comparisons stay stable under exact rescaling at this precision.
struct ImageF {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;

  ImageF() = default;
  ImageF(int w, int h, int c) : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c) {}

  double& At(int x, int y, int c = 0)
  {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double At(int x, int y, int c = 0) const
  {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

}  // namespace urbangen
