#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gcms/augment.hpp"
#include "gcms/model.hpp"
#include "gcms/raster.hpp"

namespace gcms {

// Whole-run settings. Serialized as a flat key = value text file with an
// explicit version key; every CLI flag can override a file value.
struct RunConfig {
  std::filesystem::path data_root = ".";
  std::filesystem::path out_dir = "out";
  uint64_t seed = 42;
  int jobs = 1;
  bool tta = false;
  RasterConfig raster;
  TrainConfig train;

  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Pushes the run seed into the nested configs.
  void propagate_seed();
};

}  // namespace gcms
