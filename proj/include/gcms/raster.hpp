#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcms/types.hpp"

namespace gcms {

enum class NormMode : uint8_t { none, mass, time };
enum class LogMode : uint8_t { shifted, clipped, linear };
enum class Representation : uint8_t { mass_by_time, intensity_by_time };

NormMode parse_norm_mode(const std::string& s);
LogMode parse_log_mode(const std::string& s);
const char* to_string(NormMode m);
const char* to_string(LogMode m);

struct RasterConfig {
  int n_time_slots = 192;
  int n_mass_bins = kMassBins;  // fixed at 256
  NormMode norm = NormMode::none;
  LogMode log = LogMode::shifted;
  bool positional_channels = false;
  Representation representation = Representation::mass_by_time;

  void validate() const;  // throws InputError
};

// Dense mass-by-time (or intensity-by-time) raster. R holds intensities;
// G/B are the positional planes t/(cols-1) and m/255 when enabled. All
// values live in [0,1] once the pipeline has run.
struct RasterGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> r;
  std::vector<double> g;
  std::vector<double> b;
  std::string sample_id;
  RasterConfig config;
  int64_t contributing_readings = 0;
  int64_t dropped_mass_overflow = 0;

  bool has_channels() const { return !g.empty(); }
  double at(int row, int col) const { return r[size_t(row) * cols + col]; }
  double& at(int row, int col) { return r[size_t(row) * cols + col]; }
  double* row_ptr(int row) { return r.data() + size_t(row) * cols; }
  const double* row_ptr(int row) const { return r.data() + size_t(row) * cols; }
};

// Start/end oven temperatures for one run plus the reference end value the
// baseline slot count was chosen for.
struct TemperatureHint {
  double t_start = 0.0;
  double t_end = 0.0;
  double reference_t_end = 0.0;
};

// (t - t_min) / (t_max - t_min) per reading; a zero span maps all to 0.
std::vector<double> normalize_time(const RawSample& sample);

// Intensity divided by the sample maximum; an all-zero sample stays zero.
std::vector<double> normalize_intensity(const RawSample& sample);

// Scalar log transform used by both representations. Input in [0,1];
// output rescaled to [0,1] (shifted: /log10(1001); clipped: affine from
// [-4,0]).
double apply_log_value(double v, LogMode mode);

// Mass rows = round-half-up m/z (readings above 255 dropped), time columns
// = floor(t * n_slots) clamped to the last slot, cell = mean of normalized
// intensities. Readings are accumulated in a canonical order so the result
// is independent of input row order, bit for bit.
RasterGrid bin_to_grid(const RawSample& sample, const RasterConfig& config,
                       std::optional<double> warp_alpha = std::nullopt);

RasterGrid apply_log(RasterGrid grid, LogMode mode);

// Divide each time column by its maximum (paper's mass-normalization).
RasterGrid normalize_mass(RasterGrid grid);

// Divide each mass row by its maximum (paper's time-normalization).
RasterGrid normalize_time_rows(RasterGrid grid);

// G[m][c] = c/(cols-1), B[m][c] = m/255.
RasterGrid encode_channels(RasterGrid grid);

// Swapped representation: rows bin the log-scaled normalized intensity,
// cell value is the largest contributing mass bin / 255. No positional
// channels.
RasterGrid rasterize_swapped(const RawSample& sample,
                             const RasterConfig& config,
                             std::optional<double> warp_alpha = std::nullopt);

// Full pipeline for either representation:
// normalize -> bin -> log -> norm mode -> channels.
RasterGrid rasterize(const RawSample& sample, const RasterConfig& config,
                     std::optional<double> warp_alpha = std::nullopt);

// round(base_slots * (t_end - t_start) / (reference_t_end - t_start)),
// clamped to [2, 4096]. Hotter runs get proportionally more time slots.
int temperature_scaled_slots(const TemperatureHint& hint, int base_slots);

}  // namespace gcms
