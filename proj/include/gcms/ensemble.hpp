#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gcms/model.hpp"
#include "gcms/types.hpp"

namespace gcms {

struct PredictionVector {
  std::string sample_id;
  std::array<double, kNumLabels> probs{};
};

// Member prediction sets over the same sample ids, combined by averaging
// clipped logits.
struct EnsembleSpec {
  std::vector<std::vector<PredictionVector>> members;
  double clip_epsilon = 1e-4;
};

double clip_prob(double p, double epsilon);

// ln(p / (1 - p)); p must already be clipped inside (0,1).
double prob_to_logit(double p);

// Per sample and label: sigmoid(mean over members of logit(clip(p))).
// Results come back sorted by sample_id.
std::vector<PredictionVector> ensemble(const EnsembleSpec& spec);

// Rasterize-at-192 once, then predict at each time size via resize_time
// and combine the members in logit space. Default sizes are 5 steps of 32
// centred at 192.
PredictionVector tta_predict(
    const ModelParams& params, const RasterGrid& base_grid, Derivatized d,
    const std::vector<int>& sizes = {128, 160, 192, 224, 256},
    double clip_epsilon = 1e-4);

// Mean binary cross-entropy over all (sample, label) pairs with
// clip_probs applied; the competition-style metric.
double aggregated_log_loss(
    const std::vector<PredictionVector>& preds,
    const std::vector<std::pair<std::string, LabelVector>>& labels,
    double epsilon = 1e-4);

struct KFoldResult {
  std::vector<PredictionVector> oof;                 // sorted by sample_id
  std::vector<std::pair<std::string, int>> fold_of;  // sorted by sample_id
  std::vector<double> fold_loss;
  double overall_loss = 0.0;
};

// Deterministic seeded fold assignment stratified by label cardinality;
// trains k models, each predicting its held-out fold. Fold trainings are
// independent and may run in parallel without changing the result.
KFoldResult kfold_oof(const std::vector<TrainingExample>& dataset, int k,
                      const TrainConfig& config, bool use_tta, int jobs = 1);

// Submission-style predictions CSV, probabilities at 6 decimal places.
void write_predictions_csv(
    const std::filesystem::path& path,
    const std::vector<PredictionVector>& preds,
    const std::array<std::string, kNumLabels>& label_names);

std::pair<std::array<std::string, kNumLabels>, std::vector<PredictionVector>>
read_predictions_csv(const std::filesystem::path& path);

}  // namespace gcms
