#include "urbangen/invariants.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace urbangen {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

ImageF ColorRatios(const ImageF& rgb)
{
  ImageF out(rgb.width, rgb.height, 3);
  const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb.data[i * 3 + 0];
    const double g = rgb.data[i * 3 + 1];
    const double b = rgb.data[i * 3 + 2];
    out.data[i * 3 + 0] = std::atan2(r, std::max(g, b));
    out.data[i * 3 + 1] = std::atan2(g, std::max(r, b));
    out.data[i * 3 + 2] = std::atan2(b, std::max(r, g));
  }
  return out;
}

ImageF ColorRatios(const ImageU8& rgb)
{
  ImageF real(rgb.width, rgb.height, 3);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) real.data[i] = rgb.data[i];
  return ColorRatios(real);
}

ImageU8 RatioBytes(const ImageF& ratios)
{
  ImageU8 out(ratios.width, ratios.height, ratios.channels);
  for (std::size_t i = 0; i < ratios.data.size(); ++i) {
    const long v = std::lround(ratios.data[i] / (kPi / 2) * 255.0);
    out.data[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
  }
  return out;
}

ImageF LuminancePlane(const ImageU8& rgb)
{
  ImageF out(rgb.width, rgb.height, 1);
  const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = 0.299 * rgb.data[i * 3 + 0] + 0.587 * rgb.data[i * 3 + 1] +
                  0.114 * rgb.data[i * 3 + 2];
  }
  return out;
}

std::vector<std::uint32_t> LbpCodes(const ImageF& gray)
{
  struct SampleGeom {
    double ox = 0;
    double oy = 0;
  };
  std::array<SampleGeom, kLbpNeighbors> geom;
  for (int p = 0; p < kLbpNeighbors; ++p) {
    const double ang = 2.0 * kPi * p / kLbpNeighbors;
    double ox = kLbpRadius * std::cos(ang);
    double oy = kLbpRadius * std::sin(ang);
    if (std::fabs(ox - std::round(ox)) < 1e-9) ox = std::round(ox);
    if (std::fabs(oy - std::round(oy)) < 1e-9) oy = std::round(oy);
    geom[p] = {ox, oy};
  }

  const int w = gray.width;
  const int h = gray.height;
  std::vector<std::uint32_t> codes(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = gray.At(x, y);
      std::uint32_t code = 0;
      for (int p = 0; p < kLbpNeighbors; ++p) {
        double sx = x + geom[p].ox;
        double sy = y - geom[p].oy;
        sx = std::min(std::max(sx, 0.0), static_cast<double>(w - 1));
        sy = std::min(std::max(sy, 0.0), static_cast<double>(h - 1));
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double dx = sx - x0;
        const double dy = sy - y0;
        const int x1 = std::min(x0 + 1, w - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        const double w00 = (1.0 - dx) * (1.0 - dy);
        const double w01 = dx * (1.0 - dy);
        const double w10 = (1.0 - dx) * dy;
        const double w11 = dx * dy;
        const double d00 = gray.At(x0, y0) - c;
        const double d01 = gray.At(x1, y0) - c;
        const double d10 = gray.At(x0, y1) - c;
        const double d11 = gray.At(x1, y1) - c;
        const double d = w00 * d00 + w01 * d01 + w10 * d10 + w11 * d11;
        const double mu = w00 * std::fabs(d00) + w01 * std::fabs(d01) + w10 * std::fabs(d10) +
                          w11 * std::fabs(d11);
        if (d >= -1e-9 * mu) code |= 1u << p;
      }
      codes[static_cast<std::size_t>(y) * w + x] = code;
    }
  }
  return codes;
}

std::vector<std::uint32_t> LbpCodes(const ImageU8& gray)
{
  ImageF real(gray.width, gray.height, 1);
  for (std::size_t i = 0; i < gray.data.size(); ++i) real.data[i] = gray.data[i];
  return LbpCodes(real);
}

ImageU8 LbpBytes(const std::vector<std::uint32_t>& codes, int width, int height)
{
  ImageU8 out(width, height, 1);
  for (std::size_t i = 0; i < codes.size() && i < out.data.size(); ++i) {
    const int bits = std::popcount(codes[i]);
    out.data[i] = static_cast<std::uint8_t>(std::lround(bits * 255.0 / kLbpNeighbors));
  }
  return out;
}

}  // namespace urbangen
