#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "gcms/raster.hpp"
#include "gcms/rng.hpp"
#include "gcms/types.hpp"

namespace gcms {

struct AugmentConfig {
  int resize_min = 128;
  int resize_max = 256;
  double warp_alpha_min = 0.5;
  double warp_alpha_max = 2.0;
  bool warp_enabled = false;
  double mixup_probability = 0.1;
  uint64_t rng_seed = 0;

  void validate() const;  // throws InputError
};

// Resample every mass row along the time axis with endpoint-aligned linear
// interpolation: output column c reads source coordinate c*(old-1)/(new-1).
// The positional G channel is regenerated for the new width.
RasterGrid resize_time(const RasterGrid& grid, int new_size);

// t^alpha elementwise on normalized times (applied before binning).
// alpha outside the configured range is an error.
std::vector<double> warp_time(std::vector<double> times, double alpha,
                              const AugmentConfig& config);

// Uniform integer in [resize_min, resize_max].
int sample_resize(const AugmentConfig& config, Rng& rng);

// lambda * A + (1 - lambda) * B on grid values and labels; labels become
// soft targets.
std::pair<RasterGrid, std::array<double, kNumLabels>> mixup(
    const RasterGrid& grid_a, const RasterGrid& grid_b,
    const std::array<double, kNumLabels>& labels_a,
    const std::array<double, kNumLabels>& labels_b, double lambda);

}  // namespace gcms
