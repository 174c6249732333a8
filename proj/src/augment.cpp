#include "gcms/augment.hpp"

#include <algorithm>
#include <cmath>

#include "gcms/errors.hpp"
#include "gcms/kernels.hpp"

namespace gcms {

void AugmentConfig::validate() const {
  if (resize_min < 2 || resize_min > resize_max) {
    throw InputError("augment: require 2 <= resize_min <= resize_max");
  }
  if (!(warp_alpha_min > 0.0) || warp_alpha_min > warp_alpha_max) {
    throw InputError("augment: require 0 < warp_alpha_min <= warp_alpha_max");
  }
  if (mixup_probability < 0.0 || mixup_probability > 1.0) {
    throw InputError("augment: mixup_probability must be in [0,1]");
  }
}

RasterGrid resize_time(const RasterGrid& grid, int new_size) {
  if (new_size < 2) {
    throw InputError("resize_time: new size must be >= 2");
  }
  const int old_size = grid.cols;
  if (old_size < 2) {
    throw InputError("resize_time: source grid narrower than 2 columns");
  }

  // frac stays 0 wherever x lands on an integer index, so identity resizes
  // and endpoints reproduce source values exactly.
  const size_t width = size_t(new_size);
  std::vector<int32_t> i0(width);
  std::vector<int32_t> i1(width);
  std::vector<double> frac(width);
  for (int c = 0; c < new_size; ++c) {
    const double x = double(c) * (old_size - 1) / (new_size - 1);
    int lo = int(std::floor(x));
    if (lo > old_size - 1) lo = old_size - 1;
    i0[size_t(c)] = lo;
    i1[size_t(c)] = std::min(lo + 1, old_size - 1);
    frac[size_t(c)] = x - lo;
  }

  RasterGrid out;
  out.rows = grid.rows;
  out.cols = new_size;
  out.r.resize(size_t(grid.rows) * new_size);
  out.sample_id = grid.sample_id;
  out.config = grid.config;
  out.config.n_time_slots = new_size;
  out.contributing_readings = grid.contributing_readings;
  out.dropped_mass_overflow = grid.dropped_mass_overflow;

  for (int m = 0; m < grid.rows; ++m) {
    kernels::gather_lerp(out.row_ptr(m), grid.row_ptr(m), i0.data(),
                         i1.data(), frac.data(), size_t(new_size));
  }
  if (grid.has_channels()) {
    out = encode_channels(std::move(out));
  }
  return out;
}

std::vector<double> warp_time(std::vector<double> times, double alpha,
                              const AugmentConfig& config) {
  config.validate();
  if (alpha < config.warp_alpha_min || alpha > config.warp_alpha_max) {
    throw InputError("warp_time: alpha outside configured range");
  }
  for (double& t : times) t = std::pow(t, alpha);
  return times;
}

int sample_resize(const AugmentConfig& config, Rng& rng) {
  return int(rng.next_int(config.resize_min, config.resize_max));
}

std::pair<RasterGrid, std::array<double, kNumLabels>> mixup(
    const RasterGrid& grid_a, const RasterGrid& grid_b,
    const std::array<double, kNumLabels>& labels_a,
    const std::array<double, kNumLabels>& labels_b, double lambda) {
  if (grid_a.rows != grid_b.rows || grid_a.cols != grid_b.cols ||
      grid_a.has_channels() != grid_b.has_channels()) {
    throw InputError("mixup: grid shapes differ");
  }
  if (lambda < 0.0 || lambda > 1.0) {
    throw InputError("mixup: lambda must be in [0,1]");
  }

  // dst = a + (1 - lambda) * (b - a): lambda = 1 reproduces A exactly,
  // and the kernel's clamp keeps the combination convex under rounding.
  const double u = 1.0 - lambda;

  RasterGrid out = grid_a;
  kernels::lerp_clamped(out.r.data(), grid_a.r.data(), grid_b.r.data(), u,
                        out.r.size());
  // Positional planes are identical for same-shape grids; keep A's.

  std::array<double, kNumLabels> labels{};
  for (int k = 0; k < kNumLabels; ++k) {
    const double a = labels_a[size_t(k)];
    const double b = labels_b[size_t(k)];
    const double t = a + u * (b - a);
    labels[size_t(k)] = std::min(std::max(t, std::min(a, b)), std::max(a, b));
  }
  return {std::move(out), labels};
}

}  // namespace gcms
