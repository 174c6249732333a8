#include "gcms/gcr.hpp"

#include <fstream>

#include "gcms/binio.hpp"
#include "gcms/errors.hpp"

namespace gcms {

void write_gcr(const std::filesystem::path& path, const RasterGrid& grid) {
  const int channels = grid.has_channels() ? 3 : 1;
  std::string out;
  out.reserve(16 + size_t(grid.rows) * grid.cols * channels * 4);
  out.append("GCR1", 4);
  binio::put_u32(out, uint32_t(grid.rows));
  binio::put_u32(out, uint32_t(grid.cols));
  binio::put_u32(out, uint32_t(channels));
  for (double v : grid.r) binio::put_f32(out, float(v));
  if (channels == 3) {
    for (double v : grid.g) binio::put_f32(out, float(v));
    for (double v : grid.b) binio::put_f32(out, float(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write raster file: " + path.string());
  f.write(out.data(), std::streamsize(out.size()));
}

RasterGrid read_gcr(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open raster file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  if (data.size() < 16 || data.compare(0, 4, "GCR1") != 0) {
    throw InputError("not a GCR1 raster file: " + path.string());
  }
  size_t pos = 4;
  const uint32_t rows = binio::get_u32(data, pos);
  const uint32_t cols = binio::get_u32(data, pos);
  const uint32_t channels = binio::get_u32(data, pos);
  if (rows == 0 || cols == 0 || (channels != 1 && channels != 3)) {
    throw InputError("malformed GCR1 header: " + path.string());
  }
  const size_t plane = size_t(rows) * cols;
  if (data.size() != 16 + plane * channels * 4) {
    throw InputError("GCR1 payload size mismatch: " + path.string());
  }

  RasterGrid grid;
  grid.rows = int(rows);
  grid.cols = int(cols);
  grid.sample_id = path.stem().string();
  if (cols >= 2 && cols <= 4096) grid.config.n_time_slots = int(cols);
  grid.config.positional_channels = channels == 3;
  grid.r.resize(plane);
  for (double& v : grid.r) v = double(binio::get_f32(data, pos));
  if (channels == 3) {
    grid.g.resize(plane);
    grid.b.resize(plane);
    for (double& v : grid.g) v = double(binio::get_f32(data, pos));
    for (double& v : grid.b) v = double(binio::get_f32(data, pos));
  }
  return grid;
}

}  // namespace gcms
