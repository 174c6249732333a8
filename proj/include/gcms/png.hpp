#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gcms/raster.hpp"

namespace gcms {

// Writes an 8-bit RGB PNG (color type 2). Compression settings are pinned
// so identical pixels always produce identical bytes.
void write_png_rgb8(const std::filesystem::path& path,
                    const std::vector<uint8_t>& rgb, int width, int height);

// Grid -> interleaved RGB bytes, pixel = round(255*v) clamped to [0,255].
// Default orientation puts m/z 255 on the top row, matching the figure
// convention; flip_vertical = true puts row 0 on top instead.
std::vector<uint8_t> grid_to_rgb8(const RasterGrid& grid, bool flip_vertical);

void render_png(const std::filesystem::path& png_path, const RasterGrid& grid,
                bool flip_vertical = false);

}  // namespace gcms
