#pragma once

// Minimal PNG reader/writer over zlib covering exactly the formats this
// project emits: 8-bit grayscale, 8-bit RGB, 16-bit grayscale, non-interlaced.
// The encoder is byte-deterministic (fixed filter and compression settings),
// which the reproducibility checks on whole output trees rely on.

#include <cstdint>
#include <string>
#include <vector>

#include "urbangen/image.hpp"

namespace urbangen {

std::vector<std::uint8_t> EncodePngGray8(const ImageU8& img);
std::vector<std::uint8_t> EncodePngRgb8(const ImageU8& img);
std::vector<std::uint8_t> EncodePngGray16(const ImageU16& img);

struct PngData {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;                 // 8 or 16
  std::vector<std::uint8_t> bytes;   // 8-bit samples, interleaved
  std::vector<std::uint16_t> words;  // 16-bit samples (bit_depth == 16)
};

// Throws std::runtime_error on malformed input or unsupported layout.
PngData DecodePng(const std::vector<std::uint8_t>& file);

void WriteFileBytes(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> ReadFileBytes(const std::string& path);

}  // namespace urbangen
