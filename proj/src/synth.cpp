#include "gcms/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gcms/errors.hpp"
#include "gcms/ingest.hpp"
#include "gcms/rng.hpp"

namespace gcms {

namespace {

constexpr int kPointsPerPeak = 80;

void add_peak(RawSample& sample, Rng& rng, int mz, double run_minutes,
              double scale) {
  const double mu = rng.next_range(0.15, 0.85) * run_minutes;
  const double sg = rng.next_range(0.03, 0.09) * run_minutes;
  const double amp = rng.next_range(0.5, 1.0) * scale;
  const double lo = std::max(0.0, mu - 3.0 * sg);
  const double hi = std::min(run_minutes, mu + 3.0 * sg);
  for (int i = 0; i < kPointsPerPeak; ++i) {
    const double t = lo + (hi - lo) * i / (kPointsPerPeak - 1);
    IonReading r;
    r.time_minutes = t;
    r.mass_mz = double(mz);
    r.intensity = amp * std::exp(-(t - mu) * (t - mu) / (2.0 * sg * sg));
    sample.readings.push_back(r);
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_samples < 10) {
    throw InputError("synth: need at least 10 samples, got " +
                     std::to_string(n_samples));
  }
  if (noise_level < 0.0) throw InputError("synth: noise_level must be >= 0");
  if (noise_readings < 0) throw InputError("synth: noise_readings must be >= 0");
  if (test_fraction < 0.0 || test_fraction >= 1.0) {
    throw InputError("synth: test_fraction must be in [0,1)");
  }
}

std::array<int, 3> label_signature_masses(int label) {
  if (label < 0 || label >= kNumLabels) {
    throw InputError("label index must be in [0, 8]");
  }
  const int base = 24 + 24 * label;
  return {base, base + 8, base + 16};
}

std::array<std::string, kNumLabels> synth_label_names() {
  return {"aromatic",        "hydrocarbon",      "carboxylic_acid",
          "nitrogen_bearing", "chlorine_bearing", "sulfur_bearing",
          "alcohol",          "mineral",          "oxychlorine"};
}

DatasetManifest generate_dataset(const SynthConfig& config,
                                 const std::filesystem::path& out_dir) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "samples");

  Rng rng = Rng(config.seed).substream("synth");
  std::vector<std::pair<std::string, LabelVector>> label_rows;
  std::vector<std::tuple<std::string, Derivatized, Split>> metadata_rows;

  const int n_test = int(std::floor(config.test_fraction * config.n_samples));
  for (int i = 0; i < config.n_samples; ++i) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "S%04d", i + 1);
    const std::string id = id_buf;

    LabelVector labels;
    for (int k = 0; k < kNumLabels; ++k) {
      labels.values[size_t(k)] = rng.next_unit() < (1.0 / 3.0) ? 1 : 0;
    }

    RawSample sample;
    sample.sample_id = id;
    const double run_minutes = rng.next_range(18.0, 30.0);
    // Arbitrary per-sample instrument scale; normalization removes it.
    const double scale = rng.next_range(0.5, 2.0) * 1e6;

    for (int k = 0; k < kNumLabels; ++k) {
      if (!labels.values[size_t(k)]) continue;
      for (int mz : label_signature_masses(k)) {
        add_peak(sample, rng, mz, run_minutes, scale);
      }
    }
    // Shared background: water at m/z 18, carbon dioxide at m/z 44.
    add_peak(sample, rng, 18, run_minutes, 0.8 * scale);
    add_peak(sample, rng, 44, run_minutes, 0.6 * scale);

    if (config.noise_level > 0.0) {
      for (int j = 0; j < config.noise_readings; ++j) {
        IonReading r;
        r.time_minutes = rng.next_range(0.0, run_minutes);
        r.mass_mz = rng.next_range(1.0, 255.4);
        r.intensity = rng.next_range(0.0, config.noise_level) * scale;
        sample.readings.push_back(r);
      }
    }

    Derivatized deriv;
    const double d = rng.next_unit();
    if (d < 0.45) deriv = Derivatized::yes;
    else if (d < 0.9) deriv = Derivatized::no;
    else deriv = Derivatized::unknown;
    sample.derivatized = deriv;

    const Split split =
        i >= config.n_samples - n_test ? Split::test : Split::train;

    write_sample_csv(out_dir / "samples" / (id + ".csv"), sample);
    label_rows.emplace_back(id, labels);
    metadata_rows.emplace_back(id, deriv, split);
  }

  write_labels_csv(out_dir / "labels.csv", synth_label_names(), label_rows);
  write_metadata_csv(out_dir / "metadata.csv", metadata_rows);
  return parse_manifest(out_dir / "labels.csv", out_dir / "metadata.csv");
}

}  // namespace gcms
