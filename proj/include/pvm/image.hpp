#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "pvm/dsp.hpp"
#include "pvm/errors.hpp"

namespace pvm {

/// 8-bit grayscale image, row-major, top row first.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
};

namespace detail {

inline void png_put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t png_get_u32be(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline void png_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& body) {
  png_put_u32be(out, static_cast<std::uint32_t>(body.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), body.begin(), body.end());
  const auto crc = static_cast<std::uint32_t>(
      ::crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + body.size())));
  png_put_u32be(out, crc);
}

inline std::uint8_t png_paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

}  // namespace detail

/// Encodes an 8-bit grayscale PNG (color type 0, no interlace).
inline std::vector<std::uint8_t> png_encode(const ImageBuffer& image) {
  if (image.width <= 0 || image.height <= 0) throw InvalidArgument("png_encode: empty image");
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw InvalidArgument("png_encode: pixel buffer does not match dimensions");
  }

  // raw scanlines, each prefixed with filter type 0 (none)
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(image.height) * (image.width + 1));
  for (int r = 0; r < image.height; ++r) {
    raw.push_back(0);
    const std::uint8_t* row = image.pixels.data() + static_cast<std::size_t>(r) * image.width;
    raw.insert(raw.end(), row, row + image.width);
  }

  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()),
                Z_BEST_COMPRESSION) != Z_OK) {
    throw PngError("png_encode: deflate failed");
  }
  comp.resize(comp_len);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  detail::png_put_u32be(ihdr, static_cast<std::uint32_t>(image.width));
  detail::png_put_u32be(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  detail::png_chunk(out, "IHDR", ihdr);
  detail::png_chunk(out, "IDAT", comp);
  detail::png_chunk(out, "IEND", {});
  return out;
}

/// Decodes PNGs produced by png_encode (plus any 8-bit grayscale PNG using
/// the five standard scanline filters).
inline ImageBuffer png_decode(const std::vector<std::uint8_t>& bytes) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0) {
    throw PngError("png_decode: bad signature");
  }

  ImageBuffer image;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  bool have_ihdr = false;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = detail::png_get_u32be(bytes.data() + pos);
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const std::uint8_t* body = bytes.data() + pos + 8;
    if (pos + 12 + len > bytes.size()) throw PngError("png_decode: truncated chunk");
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw PngError("png_decode: bad IHDR");
      image.width = static_cast<int>(detail::png_get_u32be(body));
      image.height = static_cast<int>(detail::png_get_u32be(body + 4));
      if (body[8] != 8 || body[9] != 0) {
        throw PngError("png_decode: only 8-bit grayscale is supported");
      }
      have_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), body, body + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!have_ihdr || image.width <= 0 || image.height <= 0 || idat.empty()) {
    throw PngError("png_decode: missing IHDR/IDAT");
  }

  const std::size_t stride = static_cast<std::size_t>(image.width) + 1;
  uLongf raw_len = static_cast<uLongf>(stride * image.height);
  std::vector<std::uint8_t> raw(raw_len);
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != stride * static_cast<std::size_t>(image.height)) {
    throw PngError("png_decode: inflate failed");
  }

  image.pixels.assign(static_cast<std::size_t>(image.width) * image.height, 0);
  for (int r = 0; r < image.height; ++r) {
    const std::uint8_t filter = raw[static_cast<std::size_t>(r) * stride];
    const std::uint8_t* src = raw.data() + static_cast<std::size_t>(r) * stride + 1;
    std::uint8_t* dst = image.pixels.data() + static_cast<std::size_t>(r) * image.width;
    const std::uint8_t* up = r > 0 ? dst - image.width : nullptr;
    for (int c = 0; c < image.width; ++c) {
      const int left = c > 0 ? dst[c - 1] : 0;
      const int above = up ? up[c] : 0;
      const int upleft = (up && c > 0) ? up[c - 1] : 0;
      int v = src[c];
      switch (filter) {
        case 0: break;
        case 1: v += left; break;
        case 2: v += above; break;
        case 3: v += (left + above) / 2; break;
        case 4: v += detail::png_paeth(left, above, upleft); break;
        default: throw PngError("png_decode: unknown filter type");
      }
      dst[c] = static_cast<std::uint8_t>(v & 0xff);
    }
  }
  return image;
}

/// Renders a mel spectrogram as a grayscale image: log10(1 + cell),
/// min-max normalized per file, band index increasing from the bottom row.
/// A constant matrix maps to all-zero pixels.
inline ImageBuffer spectrogram_to_image(const MelSpectrogram& mel) {
  if (mel.empty()) throw InvalidArgument("spectrogram_to_image: empty spectrogram");

  std::vector<double> compressed(mel.values.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mel.values.size(); ++i) {
    compressed[i] = std::log10(1.0 + mel.values[i]);
    lo = std::min(lo, compressed[i]);
    hi = std::max(hi, compressed[i]);
  }
  const double span = hi - lo;

  ImageBuffer image;
  image.width = static_cast<int>(mel.frames);
  image.height = static_cast<int>(mel.bands);
  image.pixels.resize(mel.frames * mel.bands);
  for (std::size_t f = 0; f < mel.frames; ++f) {
    for (std::size_t b = 0; b < mel.bands; ++b) {
      const std::size_t row = mel.bands - 1 - b;
      double v = span > 0.0 ? (compressed[f * mel.bands + b] - lo) / span : 0.0;
      image.pixels[row * mel.frames + f] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return image;
}

inline void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  const std::vector<std::uint8_t> bytes = png_encode(image);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw PngError("cannot write '" + path.string() + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline ImageBuffer read_png(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PngError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return png_decode(bytes);
}

}  // namespace pvm
