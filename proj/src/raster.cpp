#include "gcms/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "gcms/errors.hpp"
#include "gcms/kernels.hpp"

namespace gcms {

namespace {

// Readings sorted by (time, mass, intensity) give every pipeline the same
// accumulation order regardless of how the input file was laid out.
std::vector<uint32_t> canonical_order(const RawSample& sample) {
  std::vector<uint32_t> order(sample.readings.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    const IonReading& ra = sample.readings[a];
    const IonReading& rb = sample.readings[b];
    return std::tie(ra.time_minutes, ra.mass_mz, ra.intensity) <
           std::tie(rb.time_minutes, rb.mass_mz, rb.intensity);
  });
  return order;
}

int time_bin(double t, int n_slots) {
  int c = int(std::floor(t * n_slots));
  if (c >= n_slots) c = n_slots - 1;
  if (c < 0) c = 0;
  return c;
}

// Round-half-up integer mass bin; negative only for pathological inputs.
int64_t mass_bin(double mz) { return int64_t(std::floor(mz + 0.5)); }

}  // namespace

NormMode parse_norm_mode(const std::string& s) {
  if (s == "none") return NormMode::none;
  if (s == "mass") return NormMode::mass;
  if (s == "time") return NormMode::time;
  throw InputError("unknown norm mode '" + s + "' (none|mass|time)");
}

LogMode parse_log_mode(const std::string& s) {
  if (s == "shifted") return LogMode::shifted;
  if (s == "clipped") return LogMode::clipped;
  if (s == "linear") return LogMode::linear;
  throw InputError("unknown log mode '" + s + "' (shifted|clipped|linear)");
}

const char* to_string(NormMode m) {
  switch (m) {
    case NormMode::none: return "none";
    case NormMode::mass: return "mass";
    case NormMode::time: return "time";
  }
  return "none";
}

const char* to_string(LogMode m) {
  switch (m) {
    case LogMode::shifted: return "shifted";
    case LogMode::clipped: return "clipped";
    case LogMode::linear: return "linear";
  }
  return "linear";
}

void RasterConfig::validate() const {
  if (n_mass_bins != kMassBins) {
    throw InputError("n_mass_bins is fixed at 256");
  }
  if (n_time_slots < 2 || n_time_slots > 4096) {
    throw InputError("n_time_slots must be in [2, 4096], got " +
                     std::to_string(n_time_slots));
  }
  if (representation == Representation::intensity_by_time) {
    if (norm != NormMode::none) {
      throw InputError(
          "mass/time normalization applies to the mass_by_time "
          "representation only");
    }
    if (positional_channels) {
      throw InputError(
          "the swapped representation carries no positional channels");
    }
  }
}

std::vector<double> normalize_time(const RawSample& sample) {
  if (sample.readings.empty()) {
    throw InputError("normalize_time: sample has no readings");
  }
  double mn = sample.readings[0].time_minutes;
  double mx = mn;
  for (const IonReading& r : sample.readings) {
    mn = std::min(mn, r.time_minutes);
    mx = std::max(mx, r.time_minutes);
  }
  std::vector<double> out(sample.readings.size(), 0.0);
  if (mx == mn) return out;
  const double span = mx - mn;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = (sample.readings[i].time_minutes - mn) / span;
  }
  return out;
}

std::vector<double> normalize_intensity(const RawSample& sample) {
  if (sample.readings.empty()) {
    throw InputError("normalize_intensity: sample has no readings");
  }
  std::vector<double> out(sample.readings.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = sample.readings[i].intensity;
  }
  const double mx = kernels::max_value(out.data(), out.size());
  if (mx <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  kernels::divide_scalar(out.data(), mx, out.size());
  return out;
}

double apply_log_value(double v, LogMode mode) {
  static const double kLog10_1001 = std::log10(1001.0);
  switch (mode) {
    case LogMode::shifted:
      return std::log10(1.0 + 1000.0 * v) / kLog10_1001;
    case LogMode::clipped:
      return (std::log10(std::max(v, 1e-4)) + 4.0) / 4.0;
    case LogMode::linear:
      return v;
  }
  return v;
}

RasterGrid bin_to_grid(const RawSample& sample, const RasterConfig& config,
                       std::optional<double> warp_alpha) {
  config.validate();
  if (config.representation != Representation::mass_by_time) {
    throw InputError("bin_to_grid expects the mass_by_time representation");
  }

  const int cols = config.n_time_slots;
  RasterGrid grid;
  grid.rows = kMassBins;
  grid.cols = cols;
  grid.r.assign(size_t(kMassBins) * cols, 0.0);
  grid.sample_id = sample.sample_id;
  grid.config = config;

  std::vector<double> times = normalize_time(sample);
  if (warp_alpha) {
    for (double& t : times) t = std::pow(t, *warp_alpha);
  }
  const std::vector<double> intensities = normalize_intensity(sample);

  std::vector<double> sums(size_t(kMassBins) * cols, 0.0);
  std::vector<uint32_t> counts(size_t(kMassBins) * cols, 0);
  for (uint32_t idx : canonical_order(sample)) {
    const int64_t m = mass_bin(sample.readings[idx].mass_mz);
    if (m > kMassBins - 1) {
      ++grid.dropped_mass_overflow;
      continue;
    }
    const size_t cell =
        size_t(m) * cols + time_bin(times[idx], cols);
    sums[cell] += intensities[idx];
    ++counts[cell];
    ++grid.contributing_readings;
  }
  for (size_t i = 0; i < sums.size(); ++i) {
    if (counts[i] > 0) grid.r[i] = sums[i] / counts[i];
  }
  return grid;
}

RasterGrid apply_log(RasterGrid grid, LogMode mode) {
  if (mode == LogMode::linear) return grid;
  for (double& v : grid.r) v = apply_log_value(v, mode);
  return grid;
}

RasterGrid normalize_mass(RasterGrid grid) {
  if (grid.config.representation != Representation::mass_by_time) {
    throw InputError("normalize_mass expects a mass_by_time grid");
  }
  std::vector<double> col_max(size_t(grid.cols), 0.0);
  for (int m = 0; m < grid.rows; ++m) {
    kernels::max_accumulate(col_max.data(), grid.row_ptr(m),
                            size_t(grid.cols));
  }
  for (int m = 0; m < grid.rows; ++m) {
    kernels::divide_where_positive(grid.row_ptr(m), col_max.data(),
                                   size_t(grid.cols));
  }
  return grid;
}

RasterGrid normalize_time_rows(RasterGrid grid) {
  if (grid.config.representation != Representation::mass_by_time) {
    throw InputError("normalize_time_rows expects a mass_by_time grid");
  }
  for (int m = 0; m < grid.rows; ++m) {
    double* row = grid.row_ptr(m);
    const double mx = kernels::max_value(row, size_t(grid.cols));
    if (mx > 0.0) kernels::divide_scalar(row, mx, size_t(grid.cols));
  }
  return grid;
}

RasterGrid encode_channels(RasterGrid grid) {
  if (grid.config.representation != Representation::mass_by_time) {
    throw InputError("positional channels apply to mass_by_time grids only");
  }
  const size_t n = size_t(grid.rows) * grid.cols;
  grid.g.resize(n);
  grid.b.resize(n);
  for (int m = 0; m < grid.rows; ++m) {
    double* grow = grid.g.data() + size_t(m) * grid.cols;
    double* brow = grid.b.data() + size_t(m) * grid.cols;
    const double bval = double(m) / (kMassBins - 1);
    for (int c = 0; c < grid.cols; ++c) {
      grow[c] = double(c) / (grid.cols - 1);
      brow[c] = bval;
    }
  }
  return grid;
}

RasterGrid rasterize_swapped(const RawSample& sample,
                             const RasterConfig& config,
                             std::optional<double> warp_alpha) {
  config.validate();
  if (config.representation != Representation::intensity_by_time) {
    throw InputError(
        "rasterize_swapped expects the intensity_by_time representation");
  }

  const int cols = config.n_time_slots;
  RasterGrid grid;
  grid.rows = kMassBins;
  grid.cols = cols;
  grid.r.assign(size_t(kMassBins) * cols, 0.0);
  grid.sample_id = sample.sample_id;
  grid.config = config;

  std::vector<double> times = normalize_time(sample);
  if (warp_alpha) {
    for (double& t : times) t = std::pow(t, *warp_alpha);
  }
  const std::vector<double> intensities = normalize_intensity(sample);

  for (uint32_t idx : canonical_order(sample)) {
    const int64_t m = mass_bin(sample.readings[idx].mass_mz);
    if (m > kMassBins - 1) {
      ++grid.dropped_mass_overflow;
      continue;
    }
    const double v = apply_log_value(intensities[idx], config.log);
    int row = int(std::floor(v * kMassBins));
    if (row > kMassBins - 1) row = kMassBins - 1;
    if (row < 0) row = 0;
    double& cell = grid.at(row, time_bin(times[idx], cols));
    cell = std::max(cell, double(m) / (kMassBins - 1));
    ++grid.contributing_readings;
  }
  return grid;
}

RasterGrid rasterize(const RawSample& sample, const RasterConfig& config,
                     std::optional<double> warp_alpha) {
  config.validate();
  if (config.representation == Representation::intensity_by_time) {
    return rasterize_swapped(sample, config, warp_alpha);
  }
  RasterGrid grid = bin_to_grid(sample, config, warp_alpha);
  grid = apply_log(std::move(grid), config.log);
  switch (config.norm) {
    case NormMode::none:
      break;
    case NormMode::mass:
      grid = normalize_mass(std::move(grid));
      break;
    case NormMode::time:
      grid = normalize_time_rows(std::move(grid));
      break;
  }
  if (config.positional_channels) {
    grid = encode_channels(std::move(grid));
  }
  return grid;
}

int temperature_scaled_slots(const TemperatureHint& hint, int base_slots) {
  const double span = hint.t_end - hint.t_start;
  const double ref_span = hint.reference_t_end - hint.t_start;
  if (span <= 0.0 || ref_span <= 0.0) {
    throw InputError("temperature_scaled_slots: non-positive span");
  }
  const int64_t slots = std::llround(base_slots * (span / ref_span));
  return int(std::clamp<int64_t>(slots, 2, 4096));
}

}  // namespace gcms
