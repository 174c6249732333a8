#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gcms/augment.hpp"
#include "gcms/raster.hpp"
#include "gcms/types.hpp"

namespace gcms {

// 256 per-mass time-averaged intensities plus a derivatized one-hot pair.
inline constexpr int kFeatureDim = kMassBins + 2;

struct FeatureVector {
  std::array<double, kFeatureDim> v{};
};

// Linear classifier head: 9 logits from 258 features.
struct ModelParams {
  std::vector<double> weights;  // kNumLabels x kFeatureDim, row-major
  std::array<double, kNumLabels> bias{};

  static ModelParams zeros();
  double w(int label, int feature) const {
    return weights[size_t(label) * kFeatureDim + feature];
  }
  void validate() const;  // finite check, throws InputError
};

struct TrainConfig {
  int epochs = 20;
  double base_lr = 1e-4;
  // The paper-shaped schedule keeps base_lr at 1e-4; the linear head needs
  // far larger steps than a deep backbone, so the effective step is
  // base_lr * lr_scale (see config file docs).
  double lr_scale = 5e5;
  int warmup_epochs = 2;
  int batch_size = 8;
  double mixup_probability = 0.1;
  AugmentConfig augment;
  uint64_t rng_seed = 42;

  void validate() const;
};

// One training-ready sample: raster at the base time size plus targets.
struct TrainingExample {
  std::string sample_id;
  RasterGrid grid;
  std::array<double, kNumLabels> labels{};
  Derivatized derivatized = Derivatized::unknown;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // clean full-set loss after each epoch
};

// Mean over time columns per mass row (summed in a permutation-invariant
// order), then the derivatized one-hot: yes -> (1,0), no -> (0,1),
// unknown -> (0,0).
FeatureVector time_average_features(const RasterGrid& grid, Derivatized d);

// p_k = sigmoid(w_k . x + b_k). Validates parameter finiteness.
std::array<double, kNumLabels> predict(const ModelParams& params,
                                       const FeatureVector& features);

// Mean over the 9 labels of binary cross-entropy, probabilities clipped to
// [1e-7, 1 - 1e-7]. Soft targets allowed.
double bce_loss(const std::array<double, kNumLabels>& probs,
                const std::array<double, kNumLabels>& targets);

// Loss and analytic gradients of bce_loss(predict(params, x), y).
struct LossGradients {
  double loss = 0.0;
  std::vector<double> d_weights;  // same layout as ModelParams::weights
  std::array<double, kNumLabels> d_bias{};
};
LossGradients loss_gradients(const ModelParams& params,
                             const FeatureVector& features,
                             const std::array<double, kNumLabels>& targets);

// Linear warmup to base_lr over warmup_epochs/epochs of training, then
// cosine decay. step_fraction in [0,1]. (Callers multiply by lr_scale.)
double lr_at(double step_fraction, const TrainConfig& config);

// Mini-batch gradient descent with the schedule, per-batch random time
// resize, and mixup at the configured probability. Deterministic given
// rng_seed: fixed seed, bit-identical params.
TrainResult train(const std::vector<TrainingExample>& dataset,
                  const TrainConfig& config);

// d logit_k / d R[m][c] = w_k[m] / cols, broadcast along time; returned as
// a full map for rendering.
std::vector<double> saliency(const ModelParams& params,
                             const RasterGrid& grid, int label_index);

// GCMP v1 flat file: magic, version, dims, f64 LE weights then biases.
void save_params(const std::filesystem::path& path, const ModelParams& p);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace gcms
