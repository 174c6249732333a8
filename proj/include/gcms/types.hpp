#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gcms {

inline constexpr int kNumLabels = 9;
inline constexpr int kMassBins = 256;

// One detected-ion reading: retention time in minutes, mass-to-charge
// ratio, and intensity in arbitrary per-sample relative units.
struct IonReading {
  double time_minutes = 0.0;
  double mass_mz = 0.0;
  double intensity = 0.0;
};

enum class Derivatized : uint8_t { yes, no, unknown };

struct RawSample {
  std::string sample_id;
  std::vector<IonReading> readings;  // sorted ascending by time after ingest
  Derivatized derivatized = Derivatized::unknown;
};

// Nine nonexclusive binary targets, ordered by the manifest's label names.
struct LabelVector {
  std::array<uint8_t, kNumLabels> values{};

  int cardinality() const {
    int c = 0;
    for (uint8_t v : values) c += v != 0;
    return c;
  }
  bool operator==(const LabelVector&) const = default;
};

enum class Split : uint8_t { train, val, test };

struct ManifestEntry {
  std::string sample_id;
  std::string csv_path;  // relative to the dataset root
  Derivatized derivatized = Derivatized::unknown;
  std::optional<LabelVector> labels;
  Split split = Split::train;
};

struct DatasetManifest {
  std::array<std::string, kNumLabels> label_names;
  std::vector<ManifestEntry> entries;  // sorted by sample_id

  const ManifestEntry* find(const std::string& sample_id) const {
    for (const auto& e : entries) {
      if (e.sample_id == sample_id) return &e;
    }
    return nullptr;
  }
};

const char* to_string(Split s);
const char* to_string(Derivatized d);

}  // namespace gcms
