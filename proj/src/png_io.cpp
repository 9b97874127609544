#include "urbangen/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace urbangen {

namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t GetU32(const std::uint8_t* p)
{
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void AppendChunk(std::vector<std::uint8_t>& out, const char type[4], const std::uint8_t* data,
                 std::size_t size)
{
  PutU32(out, static_cast<std::uint32_t>(size));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (size) out.insert(out.end(), data, data + size);
  const uLong crc = crc32(crc32(0L, Z_NULL, 0), out.data() + start, static_cast<uInt>(4 + size));
  PutU32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> ZlibCompress(const std::vector<std::uint8_t>& raw)
{
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(bound);
  if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png: zlib compression failed");
  }
  out.resize(bound);
  return out;
}

// color_type: 0 = gray, 2 = RGB.
std::vector<std::uint8_t> EncodePng(int width, int height, int bit_depth, int color_type,
                                    const std::uint8_t* rows, std::size_t row_bytes)
{
  if (width <= 0 || height <= 0) throw std::runtime_error("png: empty image");

  std::vector<std::uint8_t> raw;
  raw.reserve((row_bytes + 1) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: None on every row, keeps output canonical
    raw.insert(raw.end(), rows + y * row_bytes, rows + (y + 1) * row_bytes);
  }
  const std::vector<std::uint8_t> compressed = ZlibCompress(raw);

  std::vector<std::uint8_t> out;
  const std::uint8_t signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  out.insert(out.end(), signature, signature + 8);

  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(width);
  ihdr[4] = static_cast<std::uint8_t>(height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(height);
  ihdr[8] = static_cast<std::uint8_t>(bit_depth);
  ihdr[9] = static_cast<std::uint8_t>(color_type);
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter method
  ihdr[12] = 0;  // no interlace
  AppendChunk(out, "IHDR", ihdr, sizeof(ihdr));
  AppendChunk(out, "IDAT", compressed.data(), compressed.size());
  AppendChunk(out, "IEND", nullptr, 0);
  return out;
}

}  // namespace

std::vector<std::uint8_t> EncodePngGray8(const ImageU8& img)
{
  if (img.channels != 1) throw std::runtime_error("png: gray8 expects 1 channel");
  return EncodePng(img.width, img.height, 8, 0, img.data.data(), static_cast<std::size_t>(img.width));
}

std::vector<std::uint8_t> EncodePngRgb8(const ImageU8& img)
{
  if (img.channels != 3) throw std::runtime_error("png: rgb8 expects 3 channels");
  return EncodePng(img.width, img.height, 8, 2, img.data.data(),
                   static_cast<std::size_t>(img.width) * 3);
}

std::vector<std::uint8_t> EncodePngGray16(const ImageU16& img)
{
  std::vector<std::uint8_t> rows(static_cast<std::size_t>(img.width) * img.height * 2);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    rows[2 * i] = static_cast<std::uint8_t>(img.data[i] >> 8);  // network byte order
    rows[2 * i + 1] = static_cast<std::uint8_t>(img.data[i]);
  }
  return EncodePng(img.width, img.height, 16, 0, rows.data(), static_cast<std::size_t>(img.width) * 2);
}

PngData DecodePng(const std::vector<std::uint8_t>& file)
{
  const std::uint8_t signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (file.size() < 8 || std::memcmp(file.data(), signature, 8) != 0) {
    throw std::runtime_error("png: bad signature");
  }

  PngData png;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  int color_type = -1;
  while (pos + 8 <= file.size()) {
    const std::uint32_t len = GetU32(&file[pos]);
    if (pos + 12 + len > file.size()) throw std::runtime_error("png: truncated chunk");
    const char* type = reinterpret_cast<const char*>(&file[pos + 4]);
    const std::uint8_t* data = &file[pos + 8];
    if (std::memcmp(type, "IHDR", 4) == 0) {
      png.width = static_cast<int>(GetU32(data));
      png.height = static_cast<int>(GetU32(data + 4));
      png.bit_depth = data[8];
      color_type = data[9];
      if ((png.bit_depth != 8 && png.bit_depth != 16) || (color_type != 0 && color_type != 2) ||
          data[12] != 0) {
        throw std::runtime_error("png: unsupported layout");
      }
      png.channels = color_type == 2 ? 3 : 1;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (png.width <= 0 || png.height <= 0 || idat.empty()) throw std::runtime_error("png: no image data");

  const std::size_t sample_bytes = png.bit_depth / 8;
  const std::size_t row_bytes = static_cast<std::size_t>(png.width) * png.channels * sample_bytes;
  const std::size_t raw_size = (row_bytes + 1) * static_cast<std::size_t>(png.height);
  std::vector<std::uint8_t> raw(raw_size);
  uLongf out_len = static_cast<uLongf>(raw_size);
  if (uncompress(raw.data(), &out_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      out_len != raw_size) {
    throw std::runtime_error("png: inflate failed");
  }

  // Undo per-row filters (encoder writes None, but handle the full set).
  const std::size_t bpp = png.channels * sample_bytes;
  std::vector<std::uint8_t> pixels(row_bytes * static_cast<std::size_t>(png.height));
  for (int y = 0; y < png.height; ++y) {
    const std::uint8_t filter = raw[(row_bytes + 1) * y];
    const std::uint8_t* src = &raw[(row_bytes + 1) * y + 1];
    std::uint8_t* dst = &pixels[row_bytes * y];
    const std::uint8_t* prior = y > 0 ? &pixels[row_bytes * (y - 1)] : nullptr;
    for (std::size_t i = 0; i < row_bytes; ++i) {
      const int a = i >= bpp ? dst[i - bpp] : 0;
      const int b = prior ? prior[i] : 0;
      const int c = (prior && i >= bpp) ? prior[i - bpp] : 0;
      int v = src[i];
      switch (filter) {
      case 0: break;
      case 1: v += a; break;
      case 2: v += b; break;
      case 3: v += (a + b) / 2; break;
      case 4: {
        const int p = a + b - c;
        const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
        v += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
        break;
      }
      default: throw std::runtime_error("png: bad filter byte");
      }
      dst[i] = static_cast<std::uint8_t>(v);
    }
  }

  if (png.bit_depth == 8) {
    png.bytes = std::move(pixels);
  } else {
    png.words.resize(pixels.size() / 2);
    for (std::size_t i = 0; i < png.words.size(); ++i) {
      png.words[i] = static_cast<std::uint16_t>((pixels[2 * i] << 8) | pixels[2 * i + 1]);
    }
  }
  return png;
}

void WriteFileBytes(const std::string& path, const std::vector<std::uint8_t>& bytes)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path)
{
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  const std::streamsize size = f.tellg();
  f.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  f.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!f) throw std::runtime_error("read failed: " + path);
  return bytes;
}

}  // namespace urbangen
