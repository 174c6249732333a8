#include "gcms/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "gcms/errors.hpp"
#include "gcms/parallel.hpp"
#include "gcms/rng.hpp"

namespace gcms {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<PredictionVector> sorted_by_id(std::vector<PredictionVector> v) {
  std::sort(v.begin(), v.end(),
            [](const PredictionVector& a, const PredictionVector& b) {
              return a.sample_id < b.sample_id;
            });
  return v;
}

}  // namespace

double clip_prob(double p, double epsilon) {
  return std::min(std::max(p, epsilon), 1.0 - epsilon);
}

double prob_to_logit(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw InputError("prob_to_logit: p must lie strictly inside (0,1)");
  }
  return std::log(p / (1.0 - p));
}

std::vector<PredictionVector> ensemble(const EnsembleSpec& spec) {
  if (spec.members.empty()) {
    throw InputError("ensemble: need at least one member");
  }
  if (!(spec.clip_epsilon > 0.0) || !(spec.clip_epsilon < 0.5)) {
    throw InputError("ensemble: clip_epsilon must be in (0, 0.5)");
  }

  std::vector<std::vector<PredictionVector>> members;
  members.reserve(spec.members.size());
  for (const auto& m : spec.members) members.push_back(sorted_by_id(m));

  const auto& first = members.front();
  for (const auto& m : members) {
    if (m.size() != first.size()) {
      throw InputError("ensemble: members cover different sample sets");
    }
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i].sample_id != first[i].sample_id) {
        throw InputError("ensemble: sample_id mismatch across members: " +
                         m[i].sample_id + " vs " + first[i].sample_id);
      }
    }
  }

  // Logits are summed in sorted order so the combination is exactly
  // invariant under member reordering.
  std::vector<PredictionVector> out(first.size());
  std::vector<double> logits(members.size());
  for (size_t i = 0; i < first.size(); ++i) {
    out[i].sample_id = first[i].sample_id;
    for (int k = 0; k < kNumLabels; ++k) {
      for (size_t mi = 0; mi < members.size(); ++mi) {
        logits[mi] = prob_to_logit(
            clip_prob(members[mi][i].probs[size_t(k)], spec.clip_epsilon));
      }
      std::sort(logits.begin(), logits.end());
      double logit_sum = 0.0;
      for (double l : logits) logit_sum += l;
      out[i].probs[size_t(k)] = sigmoid(logit_sum / double(members.size()));
    }
  }
  return out;
}

PredictionVector tta_predict(const ModelParams& params,
                             const RasterGrid& base_grid, Derivatized d,
                             const std::vector<int>& sizes,
                             double clip_epsilon) {
  if (sizes.empty()) {
    throw InputError("tta_predict: size list is empty");
  }
  EnsembleSpec spec;
  spec.clip_epsilon = clip_epsilon;
  for (int size : sizes) {
    const RasterGrid resized = resize_time(base_grid, size);
    PredictionVector pv;
    pv.sample_id = base_grid.sample_id;
    pv.probs = predict(params, time_average_features(resized, d));
    spec.members.push_back({std::move(pv)});
  }
  return ensemble(spec).front();
}

double aggregated_log_loss(
    const std::vector<PredictionVector>& preds,
    const std::vector<std::pair<std::string, LabelVector>>& labels,
    double epsilon) {
  if (preds.empty()) {
    throw InputError("aggregated_log_loss: no predictions");
  }
  std::map<std::string, const LabelVector*> by_id;
  for (const auto& [id, lv] : labels) by_id[id] = &lv;
  if (by_id.size() != labels.size() || preds.size() != labels.size()) {
    throw InputError("aggregated_log_loss: predictions and labels must "
                     "cover identical sample sets");
  }
  double acc = 0.0;
  for (const auto& pv : preds) {
    const auto it = by_id.find(pv.sample_id);
    if (it == by_id.end()) {
      throw InputError("aggregated_log_loss: no labels for sample " +
                       pv.sample_id);
    }
    for (int k = 0; k < kNumLabels; ++k) {
      const double p = clip_prob(pv.probs[size_t(k)], epsilon);
      const double y = it->second->values[size_t(k)] ? 1.0 : 0.0;
      acc += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
  }
  return acc / (double(preds.size()) * kNumLabels);
}

KFoldResult kfold_oof(const std::vector<TrainingExample>& dataset, int k,
                      const TrainConfig& config, bool use_tta, int jobs) {
  if (k < 2) throw InputError("kfold: k must be >= 2");
  if (dataset.size() < size_t(k)) {
    throw InputError("kfold: fewer labeled samples (" +
                     std::to_string(dataset.size()) + ") than folds (" +
                     std::to_string(k) + ")");
  }

  // Stratify by the number of positive labels: group, shuffle within each
  // group, then deal round-robin.
  const size_t n = dataset.size();
  std::map<int, std::vector<size_t>> by_cardinality;
  for (size_t i = 0; i < n; ++i) {
    int card = 0;
    for (double v : dataset[i].labels) card += v > 0.5;
    by_cardinality[card].push_back(i);
  }
  Rng fold_rng = Rng(config.rng_seed).substream("folds");
  std::vector<int> fold(n);
  size_t dealt = 0;
  for (auto& [card, group] : by_cardinality) {
    std::sort(group.begin(), group.end(), [&](size_t a, size_t b) {
      return dataset[a].sample_id < dataset[b].sample_id;
    });
    fold_rng.shuffle(group);
    for (size_t idx : group) fold[idx] = int(dealt++ % size_t(k));
  }

  const size_t fold_count = size_t(k);
  std::vector<std::vector<PredictionVector>> fold_preds(fold_count);
  parallel_for(fold_count, jobs, [&](size_t f) {
    std::vector<TrainingExample> train_set;
    train_set.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (fold[i] != int(f)) train_set.push_back(dataset[i]);
    }
    TrainConfig fold_config = config;
    fold_config.rng_seed =
        Rng(config.rng_seed).substream("fold:" + std::to_string(f)).next_u64();
    const TrainResult trained = train(train_set, fold_config);

    for (size_t i = 0; i < n; ++i) {
      if (fold[i] != int(f)) continue;
      const TrainingExample& ex = dataset[i];
      PredictionVector pv;
      if (use_tta) {
        pv = tta_predict(trained.params, ex.grid, ex.derivatized);
      } else {
        pv.sample_id = ex.sample_id;
        pv.probs = predict(trained.params,
                           time_average_features(ex.grid, ex.derivatized));
      }
      fold_preds[f].push_back(std::move(pv));
    }
  });

  KFoldResult result;
  std::vector<std::pair<std::string, LabelVector>> all_labels;
  result.fold_loss.resize(size_t(k));
  for (int f = 0; f < k; ++f) {
    std::vector<std::pair<std::string, LabelVector>> fold_labels;
    for (size_t i = 0; i < n; ++i) {
      if (fold[i] != f) continue;
      LabelVector lv;
      for (int j = 0; j < kNumLabels; ++j) {
        lv.values[size_t(j)] = dataset[i].labels[size_t(j)] > 0.5 ? 1 : 0;
      }
      fold_labels.emplace_back(dataset[i].sample_id, lv);
      all_labels.emplace_back(dataset[i].sample_id, lv);
    }
    result.fold_loss[size_t(f)] =
        aggregated_log_loss(fold_preds[size_t(f)], fold_labels);
    for (auto& pv : fold_preds[size_t(f)]) result.oof.push_back(std::move(pv));
  }
  result.oof = sorted_by_id(std::move(result.oof));
  result.overall_loss = aggregated_log_loss(result.oof, all_labels);
  for (size_t i = 0; i < n; ++i) {
    result.fold_of.emplace_back(dataset[i].sample_id, fold[i]);
  }
  std::sort(result.fold_of.begin(), result.fold_of.end());
  return result;
}

void write_predictions_csv(
    const std::filesystem::path& path,
    const std::vector<PredictionVector>& preds,
    const std::array<std::string, kNumLabels>& label_names) {
  std::vector<PredictionVector> rows = sorted_by_id(preds);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write predictions CSV: " + path.string());
  f << "sample_id";
  for (const auto& n : label_names) f << ',' << n;
  f << '\n';
  char buf[32];
  for (const auto& pv : rows) {
    f << pv.sample_id;
    for (double p : pv.probs) {
      std::snprintf(buf, sizeof buf, ",%.6f", p);
      f << buf;
    }
    f << '\n';
  }
}

std::pair<std::array<std::string, kNumLabels>, std::vector<PredictionVector>>
read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open predictions CSV: " + path.string());

  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    for (;;) {
      const size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        out.push_back(line.substr(start));
        return out;
      }
      out.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
  };

  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("predictions CSV has no header: " + path.string());
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() != kNumLabels + 1 || header[0] != "sample_id") {
    throw InputError("predictions CSV header must be sample_id plus " +
                     std::to_string(kNumLabels) + " label columns");
  }
  std::array<std::string, kNumLabels> names;
  for (int i = 0; i < kNumLabels; ++i) names[size_t(i)] = header[size_t(i) + 1];

  std::vector<PredictionVector> preds;
  std::set<std::string> seen;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != kNumLabels + 1) {
      throw InputError("predictions CSV line " + std::to_string(line_no) +
                       ": expected " + std::to_string(kNumLabels + 1) +
                       " fields");
    }
    if (!seen.insert(cells[0]).second) {
      throw InputError("predictions CSV: duplicate sample_id " + cells[0]);
    }
    PredictionVector pv;
    pv.sample_id = cells[0];
    for (int k = 0; k < kNumLabels; ++k) {
      const std::string& c = cells[size_t(k) + 1];
      double p = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), p);
      if (ec != std::errc() || ptr != c.data() + c.size() ||
          !std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw InputError("predictions CSV line " + std::to_string(line_no) +
                         ": probability must be a finite value in [0,1]");
      }
      pv.probs[size_t(k)] = p;
    }
    preds.push_back(std::move(pv));
  }
  return {names, preds};
}

}  // namespace gcms
