#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "gcms/model.hpp"
#include "gcms/raster.hpp"
#include "gcms/types.hpp"

namespace gcms {

// Parses and rasterizes manifest entries in parallel, returning examples
// sorted by sample_id (so the jobs count never changes downstream bytes).
// split = nullopt loads every entry. require_labels drops unlabeled ones.
std::vector<TrainingExample> load_examples(
    const DatasetManifest& manifest, const std::filesystem::path& data_root,
    const RasterConfig& raster_config, std::optional<Split> split,
    bool require_labels, int jobs);

}  // namespace gcms
