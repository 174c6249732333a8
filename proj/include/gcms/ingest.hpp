#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "gcms/types.hpp"

namespace gcms {

// Per-file parse bookkeeping. Rejected rows (non-numeric cells, non-finite
// values, out-of-domain fields) are skipped and counted instead of failing
// the whole file; instrument glitches should not kill a batch run.
struct ParseStats {
  size_t rows_total = 0;
  size_t rows_rejected = 0;
  std::vector<std::pair<size_t, std::string>> row_errors;  // (line, reason)
};

inline constexpr size_t kMaxRecordedRowErrors = 16;

// Reads one sample CSV with header columns time/mass/intensity (any order,
// case-insensitive). Readings come back sorted by time; sample_id is the
// file stem. Throws InputError on missing file, missing column, or zero
// valid rows.
RawSample parse_sample_csv(const std::filesystem::path& path,
                           ParseStats* stats = nullptr);

// Shortest round-trip float formatting; re-parsing yields identical bits.
void write_sample_csv(const std::filesystem::path& path,
                      const RawSample& sample);

// labels.csv: header "sample_id,<label1>,...,<label9>", values 0/1.
std::pair<std::array<std::string, kNumLabels>,
          std::vector<std::pair<std::string, LabelVector>>>
read_labels_csv(const std::filesystem::path& path);

void write_labels_csv(
    const std::filesystem::path& path,
    const std::array<std::string, kNumLabels>& label_names,
    const std::vector<std::pair<std::string, LabelVector>>& rows);

// metadata.csv: header "sample_id,derivatized,split".
void write_metadata_csv(
    const std::filesystem::path& path,
    const std::vector<std::tuple<std::string, Derivatized, Split>>& rows);

// Joins labels.csv and metadata.csv into one manifest. Metadata is the
// master sample list; labeled ids missing from it are appended as train
// entries. Sample CSVs are expected at samples/<id>.csv under the root.
DatasetManifest parse_manifest(const std::filesystem::path& labels_path,
                               const std::filesystem::path& metadata_path);

}  // namespace gcms
