#pragma once

#include <cstdint>
#include <vector>

#include "urbangen/image.hpp"

namespace urbangen {

// Photometric color ratios. Per pixel:
//   c1 = atan2(R, max(G, B)), c2 = atan2(G, max(R, B)), c3 = atan2(B, max(R, G))
// so every channel lies in [0, pi/2]; a zero denominator yields pi/2 for a
// positive numerator and 0 when the numerator is zero as well. Multiplying all
// input channels by one positive constant leaves the output unchanged up to
// floating-point rounding of the scaled inputs.
ImageF ColorRatios(const ImageF& rgb);
ImageF ColorRatios(const ImageU8& rgb);

// 8-bit storage encoding of a ratio image: byte = round(value / (pi/2) * 255).
ImageU8 RatioBytes(const ImageF& ratios);

// Luminance plane 0.299 R + 0.587 G + 0.114 B, kept in double precision so a
// strictly monotone rescale of the color image stays strictly monotone here.
ImageF LuminancePlane(const ImageU8& rgb);

constexpr int kLbpRadius = 3;
constexpr int kLbpNeighbors = 24;

// Local binary patterns on the radius-3 circle with 24 samples. For the pixel
// at (x, y), neighbor p sits at
//   (x + ox[p], y - oy[p]),  ox[p] = r*cos(2*pi*p/P),  oy[p] = r*sin(2*pi*p/P)
// (counter-clockwise from the +x axis with image rows growing downward), with
// each offset snapped to the nearest integer when within 1e-9 of it. Sample
// coordinates are clamped into the image rectangle (replicate borders) and the
// value is bilinear:
//   x0 = floor(sx), dx = sx - x0 (y likewise, corner indices clamped)
//   w00 = (1-dx)*(1-dy),  w01 = dx*(1-dy),  w10 = (1-dx)*dy,  w11 = dx*dy
// With c the center value, the signed contrast and its magnitude are
//   d  = w00*(g00 - c) + w01*(g01 - c) + w10*(g10 - c) + w11*(g11 - c)
//   mu = w00*|g00 - c| + w01*|g01 - c| + w10*|g10 - c| + w11*|g11 - c|
// summed left to right, and bit p is set iff d >= -1e-9 * mu. The tolerance is
// relative to the local contrast, so it rescales together with the image: the
// predicate is exactly invariant under multiplication by a positive constant
// (the rounding noise of scaled inputs stays far inside the tolerance band,
// and exact cancellations stay exact). The code packs bit p at weight 2^p, so
// values stay below 2^24.
std::vector<std::uint32_t> LbpCodes(const ImageF& gray);
std::vector<std::uint32_t> LbpCodes(const ImageU8& gray);

// Visualization byte per code: population count scaled onto 0..255.
ImageU8 LbpBytes(const std::vector<std::uint32_t>& codes, int width, int height);

}  // namespace urbangen
