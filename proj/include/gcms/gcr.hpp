#pragma once

#include <filesystem>

#include "gcms/raster.hpp"

namespace gcms {

// GCR1 raster container: 16-byte header (magic "GCR1", u32 rows, u32 cols,
// u32 channel count), then row-major f32 little-endian planes R[, G, B].
void write_gcr(const std::filesystem::path& path, const RasterGrid& grid);
RasterGrid read_gcr(const std::filesystem::path& path);

}  // namespace gcms
