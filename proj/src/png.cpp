#include "gcms/png.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "gcms/errors.hpp"

namespace gcms {

namespace {

void put_be32(std::string& out, uint32_t v) {
  out.push_back(char((v >> 24) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
  put_be32(out, uint32_t(data.size()));
  const size_t start = out.size();
  out.append(type, 4);
  out += data;
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(out.data() + start),
              uInt(out.size() - start));
  put_be32(out, uint32_t(crc));
}

}  // namespace

void write_png_rgb8(const std::filesystem::path& path,
                    const std::vector<uint8_t>& rgb, int width, int height) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != size_t(width) * height * 3) {
    throw InputError("write_png_rgb8: pixel buffer does not match dimensions");
  }

  // Filter byte 0 in front of every scanline.
  std::string raw;
  raw.reserve(size_t(height) * (size_t(width) * 3 + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(rgb.data()) +
                   size_t(y) * width * 3,
               size_t(width) * 3);
  }

  uLongf bound = compressBound(uLong(raw.size()));
  std::string compressed(bound, '\0');
  const int rc =
      compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()), uLong(raw.size()),
                6);
  if (rc != Z_OK) {
    throw std::runtime_error("png: zlib compression failed");
  }
  compressed.resize(bound);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, uint32_t(width));
  put_be32(ihdr, uint32_t(height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", "");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write PNG: " + path.string());
  f.write(out.data(), std::streamsize(out.size()));
}

std::vector<uint8_t> grid_to_rgb8(const RasterGrid& grid, bool flip_vertical) {
  auto to_byte = [](double v) {
    const long b = std::lround(255.0 * v);
    return uint8_t(std::min(255L, std::max(0L, b)));
  };
  std::vector<uint8_t> rgb(size_t(grid.rows) * grid.cols * 3);
  for (int y = 0; y < grid.rows; ++y) {
    const int m = flip_vertical ? y : grid.rows - 1 - y;
    for (int c = 0; c < grid.cols; ++c) {
      const size_t cell = size_t(m) * grid.cols + c;
      const size_t px = (size_t(y) * grid.cols + c) * 3;
      rgb[px] = to_byte(grid.r[cell]);
      rgb[px + 1] = grid.has_channels() ? to_byte(grid.g[cell]) : 0;
      rgb[px + 2] = grid.has_channels() ? to_byte(grid.b[cell]) : 0;
    }
  }
  return rgb;
}

void render_png(const std::filesystem::path& png_path, const RasterGrid& grid,
                bool flip_vertical) {
  write_png_rgb8(png_path, grid_to_rgb8(grid, flip_vertical), grid.cols,
                 grid.rows);
}

}  // namespace gcms
