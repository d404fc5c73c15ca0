#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <zlib.h>

namespace mublab {

namespace detail {

inline void png_be32(std::vector<unsigned char>& out, std::uint32_t x) {
  out.push_back(static_cast<unsigned char>(x >> 24));
  out.push_back(static_cast<unsigned char>(x >> 16));
  out.push_back(static_cast<unsigned char>(x >> 8));
  out.push_back(static_cast<unsigned char>(x));
}

inline void png_chunk(std::vector<unsigned char>& out, const char* type,
                      const std::vector<unsigned char>& data) {
  png_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(4 + data.size()));
  png_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

/// Linear 8-bit quantization of [lo, hi]; values outside the range clamp.
inline std::vector<unsigned char> quantize_gray8(const Eigen::MatrixXd& values, double lo,
                                                 double hi) {
  if (!(hi > lo)) throw std::invalid_argument("quantize_gray8: need hi > lo");
  std::vector<unsigned char> px;
  px.reserve(static_cast<std::size_t>(values.rows()) * values.cols());
  const double scale = 255.0 / (hi - lo);
  for (int r = 0; r < values.rows(); ++r)
    for (int c = 0; c < values.cols(); ++c) {
      double v = (values(r, c) - lo) * scale;
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      px.push_back(static_cast<unsigned char>(v + 0.5));
    }
  return px;
}

/// Minimal grayscale PNG encoder (8-bit, no interlace), zlib-deflated.
inline void write_png_gray8(const std::string& path, const std::vector<unsigned char>& pixels,
                            int width, int height) {
  if (width <= 0 || height <= 0 ||
      pixels.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("write_png_gray8: pixel buffer does not match size");

  // filter byte 0 before every scanline
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int r = 0; r < height; ++r) {
    raw.push_back(0);
    raw.insert(raw.end(), pixels.begin() + static_cast<std::size_t>(r) * width,
               pixels.begin() + static_cast<std::size_t>(r + 1) * width);
  }
  uLongf compressed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(compressed_len);
  if (compress2(compressed.data(), &compressed_len, raw.data(),
                static_cast<uLong>(raw.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
    throw std::runtime_error("write_png_gray8: deflate failed");
  compressed.resize(compressed_len);

  std::vector<unsigned char> file = {137, 'P', 'N', 'G', 13, 10, 26, 10};
  std::vector<unsigned char> ihdr;
  detail::png_be32(ihdr, static_cast<std::uint32_t>(width));
  detail::png_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  detail::png_chunk(file, "IHDR", ihdr);
  detail::png_chunk(file, "IDAT", compressed);
  detail::png_chunk(file, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_png_gray8: cannot open " + path);
  out.write(reinterpret_cast<const char*>(file.data()),
            static_cast<std::streamsize>(file.size()));
  if (!out.good()) throw std::runtime_error("write_png_gray8: write failed for " + path);
}

}  // namespace mublab
