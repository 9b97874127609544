#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "urbangen/invariants.hpp"
#include "urbangen/random.hpp"

using namespace urbangen;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Reference LBP bit, written from the documented per-pixel definition with no
// precomputation: offsets, clamping, weights and the difference sum are all
// rebuilt from scratch for every sample.
std::uint32_t OracleLbpCode(const ImageF& g, int x, int y)
{
  const double c = g.At(x, y);
  std::uint32_t code = 0;
  for (int p = 0; p < kLbpNeighbors; ++p) {
    const double ang = 2.0 * kPi * p / kLbpNeighbors;
    double ox = kLbpRadius * std::cos(ang);
    double oy = kLbpRadius * std::sin(ang);
    if (std::fabs(ox - std::round(ox)) < 1e-9) ox = std::round(ox);
    if (std::fabs(oy - std::round(oy)) < 1e-9) oy = std::round(oy);
    double sx = x + ox;
    double sy = y - oy;
    sx = std::min(std::max(sx, 0.0), static_cast<double>(g.width - 1));
    sy = std::min(std::max(sy, 0.0), static_cast<double>(g.height - 1));
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const double dx = sx - x0;
    const double dy = sy - y0;
    const int x1 = std::min(x0 + 1, g.width - 1);
    const int y1 = std::min(y0 + 1, g.height - 1);
    const double w00 = (1.0 - dx) * (1.0 - dy);
    const double w01 = dx * (1.0 - dy);
    const double w10 = (1.0 - dx) * dy;
    const double w11 = dx * dy;
    const double d00 = g.At(x0, y0) - c;
    const double d01 = g.At(x1, y0) - c;
    const double d10 = g.At(x0, y1) - c;
    const double d11 = g.At(x1, y1) - c;
    const double d = w00 * d00 + w01 * d01 + w10 * d10 + w11 * d11;
    const double mu =
        w00 * std::fabs(d00) + w01 * std::fabs(d01) + w10 * std::fabs(d10) + w11 * std::fabs(d11);
    if (d >= -1e-9 * mu) code |= 1u << p;
  }
  return code;
}

ImageF RandomGray(std::uint64_t key, int w, int h)
{
  RandomSource src(key);
  ImageF img(w, h, 1);
  for (double& v : img.data) v = static_cast<double>(SampleUniformInt(src, 0, 255));
  return img;
}

ImageU8 RandomRgb(std::uint64_t key, int w, int h)
{
  RandomSource src(key);
  ImageU8 img(w, h, 3);
  for (std::uint8_t& v : img.data) v = static_cast<std::uint8_t>(SampleUniformInt(src, 0, 255));
  return img;
}

ImageF Scaled(const ImageF& img, double alpha)
{
  ImageF out = img;
  for (double& v : out.data) v *= alpha;
  return out;
}

}  // namespace

TEST_CASE("color ratios: gray, saturated and degenerate pixels")
{
  ImageU8 img(3, 1, 3);
  // Gray pixel, pure red pixel, black pixel.
  img.At(0, 0, 0) = 100;
  img.At(0, 0, 1) = 100;
  img.At(0, 0, 2) = 100;
  img.At(1, 0, 0) = 255;
  const ImageF r = ColorRatios(img);
  CHECK(r.At(0, 0, 0) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(r.At(0, 0, 1) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(r.At(0, 0, 2) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(r.At(1, 0, 0) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(r.At(1, 0, 1) == 0.0);
  CHECK(r.At(1, 0, 2) == 0.0);
  CHECK(r.At(2, 0, 0) == 0.0);
  CHECK(r.At(2, 0, 1) == 0.0);
  CHECK(r.At(2, 0, 2) == 0.0);
}

TEST_CASE("color ratios: every value sits in [0, pi/2]")
{
  const ImageU8 img = RandomRgb(0xc01001u, 32, 24);
  const ImageF r = ColorRatios(img);
  for (const double v : r.data) {
    CHECK(v >= 0.0);
    CHECK(v <= kPi / 2 + 1e-15);
  }
}

TEST_CASE("color ratios: invariant under positive scaling of a real image")
{
  for (int i = 0; i < 20; ++i) {
    const ImageU8 bytes = RandomRgb(0xc01002u + i, 24, 24);
    ImageF real(bytes.width, bytes.height, 3);
    for (std::size_t k = 0; k < bytes.data.size(); ++k) real.data[k] = bytes.data[k];
    for (const double alpha : {0.25, 0.5, 0.7, 0.9, 2.5}) {
      ImageF scaled = real;
      for (double& v : scaled.data) v *= alpha;
      const ImageF a = ColorRatios(real);
      const ImageF b = ColorRatios(scaled);
      double worst = 0;
      for (std::size_t k = 0; k < a.data.size(); ++k)
        worst = std::max(worst, std::fabs(a.data[k] - b.data[k]));
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("color ratios: byte storage of scaled and original images agrees")
{
  for (int i = 0; i < 20; ++i) {
    const ImageU8 bytes = RandomRgb(0xc01044u + i, 32, 32);
    ImageF real(bytes.width, bytes.height, 3);
    for (std::size_t k = 0; k < bytes.data.size(); ++k) real.data[k] = bytes.data[k];
    for (const double alpha : {0.25, 0.5, 0.9}) {
      const ImageU8 qa = RatioBytes(ColorRatios(real));
      const ImageU8 qb = RatioBytes(ColorRatios(Scaled(real, alpha)));
      double mae = 0;
      for (std::size_t k = 0; k < qa.data.size(); ++k)
        mae += std::fabs(static_cast<double>(qa.data[k]) - static_cast<double>(qb.data[k]));
      mae /= 255.0 * static_cast<double>(qa.data.size());
      CHECK(mae < 1e-3);
    }
  }
}

TEST_CASE("luminance plane uses the documented weights")
{
  ImageU8 img(2, 1, 3);
  img.At(0, 0, 0) = 255;
  img.At(1, 0, 1) = 200;
  const ImageF lum = LuminancePlane(img);
  CHECK(lum.At(0, 0) == doctest::Approx(0.299 * 255).epsilon(1e-12));
  CHECK(lum.At(1, 0) == doctest::Approx(0.587 * 200).epsilon(1e-12));
}

TEST_CASE("lbp: constant image yields the all-ones code everywhere")
{
  ImageF img(17, 11, 1);
  for (double& v : img.data) v = 137.0;
  const std::vector<std::uint32_t> codes = LbpCodes(img);
  REQUIRE(codes.size() == 17u * 11u);
  for (const std::uint32_t c : codes) CHECK(c == (1u << kLbpNeighbors) - 1);
}

TEST_CASE("lbp: codes stay below 2^24")
{
  const ImageF img = RandomGray(0x1b901u, 40, 30);
  for (const std::uint32_t c : LbpCodes(img)) CHECK(c < (1u << 24));
}

TEST_CASE("lbp: matches the brute-force oracle on random images")
{
  for (int i = 0; i < 6; ++i) {
    const ImageF img = RandomGray(0x1b902u + i, 64, 64);
    const std::vector<std::uint32_t> codes = LbpCodes(img);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        REQUIRE(codes[static_cast<std::size_t>(y) * img.width + x] == OracleLbpCode(img, x, y));
  }
}

TEST_CASE("lbp: matches the oracle across a vertical step edge")
{
  ImageF img(32, 16, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) img.At(x, y) = x < 13 ? 40.0 : 180.0;
  const std::vector<std::uint32_t> codes = LbpCodes(img);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      REQUIRE(codes[static_cast<std::size_t>(y) * img.width + x] == OracleLbpCode(img, x, y));
}

TEST_CASE("lbp: codes are exactly invariant under positive intensity scaling")
{
  for (int i = 0; i < 10; ++i) {
    const ImageF img = RandomGray(0x1b950u + i, 48, 48);
    const std::vector<std::uint32_t> base = LbpCodes(img);
    for (const double alpha : {0.25, 0.5, 0.9}) {
      const std::vector<std::uint32_t> scaled = LbpCodes(Scaled(img, alpha));
      REQUIRE(scaled == base);
    }
  }
}

TEST_CASE("lbp: codes are exactly invariant under positive affine maps")
{
  const ImageF img = RandomGray(0x1b970u, 48, 48);
  const std::vector<std::uint32_t> base = LbpCodes(img);
  ImageF mapped = img;
  for (double& v : mapped.data) v = 0.5 * v + 16.0;
  REQUIRE(LbpCodes(mapped) == base);
}

TEST_CASE("lbp: byte-image overload equals the real-image path")
{
  ImageU8 bytes(20, 20, 1);
  RandomSource src(0x1b990u);
  for (std::uint8_t& v : bytes.data) v = static_cast<std::uint8_t>(SampleUniformInt(src, 0, 255));
  ImageF real(20, 20, 1);
  for (std::size_t k = 0; k < bytes.data.size(); ++k) real.data[k] = bytes.data[k];
  REQUIRE(LbpCodes(bytes) == LbpCodes(real));
}

TEST_CASE("lbp visualization bytes scale the population count")
{
  std::vector<std::uint32_t> codes = {0u, (1u << 24) - 1, 0x000fffu};
  const ImageU8 img = LbpBytes(codes, 3, 1);
  CHECK(img.At(0, 0) == 0);
  CHECK(img.At(1, 0) == 255);
  CHECK(img.At(2, 0) == static_cast<std::uint8_t>(std::lround(12.0 * 255.0 / 24.0)));
}
