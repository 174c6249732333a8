#include "gcms/pipeline.hpp"

#include <algorithm>

#include "gcms/errors.hpp"
#include "gcms/ingest.hpp"
#include "gcms/parallel.hpp"

namespace gcms {

std::vector<TrainingExample> load_examples(
    const DatasetManifest& manifest, const std::filesystem::path& data_root,
    const RasterConfig& raster_config, std::optional<Split> split,
    bool require_labels, int jobs) {
  std::vector<const ManifestEntry*> wanted;
  for (const ManifestEntry& e : manifest.entries) {
    if (split && e.split != *split) continue;
    if (require_labels && !e.labels) continue;
    wanted.push_back(&e);
  }

  std::vector<TrainingExample> out(wanted.size());
  parallel_for(wanted.size(), jobs, [&](size_t i) {
    const ManifestEntry& e = *wanted[i];
    const RawSample sample = parse_sample_csv(data_root / e.csv_path);
    TrainingExample ex;
    ex.sample_id = e.sample_id;
    ex.grid = rasterize(sample, raster_config);
    ex.derivatized = e.derivatized;
    if (e.labels) {
      for (int k = 0; k < kNumLabels; ++k) {
        ex.labels[size_t(k)] = e.labels->values[size_t(k)] ? 1.0 : 0.0;
      }
    }
    out[i] = std::move(ex);
  });

  // Manifest entries are already id-sorted; keep the contract explicit.
  std::sort(out.begin(), out.end(),
            [](const TrainingExample& a, const TrainingExample& b) {
              return a.sample_id < b.sample_id;
            });
  return out;
}

}  // namespace gcms
