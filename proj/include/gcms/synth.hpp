#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "gcms/types.hpp"

namespace gcms {

// Synthetic GCMS benchmark: each label owns three disjoint m/z peaks with
// Gaussian time profiles, every sample carries shared background peaks,
// plus optional low-amplitude noise readings. Labels are recoverable from
// the signature masses alone, which makes the set linearly separable for
// the time-averaged head.
struct SynthConfig {
  int n_samples = 100;
  uint64_t seed = 7;
  double noise_level = 0.02;  // noise amplitude relative to the peak scale
  int noise_readings = 150;
  double test_fraction = 0.0;

  void validate() const;  // n_samples >= 10
};

// Signature m/z values owned by label k (disjoint across labels, disjoint
// from the shared background masses 18 and 44).
std::array<int, 3> label_signature_masses(int label);

std::array<std::string, kNumLabels> synth_label_names();

// Writes samples/<id>.csv, labels.csv and metadata.csv under out_dir and
// returns the manifest. Fully deterministic per seed.
DatasetManifest generate_dataset(const SynthConfig& config,
                                 const std::filesystem::path& out_dir);

}  // namespace gcms
