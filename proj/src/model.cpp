#include "gcms/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "gcms/binio.hpp"
#include "gcms/errors.hpp"
#include "gcms/kernels.hpp"

namespace gcms {

namespace {

constexpr double kLossClip = 1e-7;

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clipped(double p) {
  return std::min(std::max(p, kLossClip), 1.0 - kLossClip);
}

std::array<double, kNumLabels> forward(const ModelParams& params,
                                       const FeatureVector& x) {
  std::array<double, kNumLabels> p{};
  for (int k = 0; k < kNumLabels; ++k) {
    const double* w = params.weights.data() + size_t(k) * kFeatureDim;
    double z = params.bias[size_t(k)];
    for (int j = 0; j < kFeatureDim; ++j) {
      z += w[j] * x.v[size_t(j)];
    }
    p[size_t(k)] = sigmoid(z);
  }
  return p;
}

}  // namespace

ModelParams ModelParams::zeros() {
  ModelParams p;
  p.weights.assign(size_t(kNumLabels) * kFeatureDim, 0.0);
  return p;
}

void ModelParams::validate() const {
  if (weights.size() != size_t(kNumLabels) * kFeatureDim) {
    throw InputError("model params have wrong shape");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw InputError("model params contain non-finite weight");
  }
  for (double v : bias) {
    if (!std::isfinite(v)) throw InputError("model params contain non-finite bias");
  }
}

void TrainConfig::validate() const {
  if (epochs < 0) throw InputError("train: epochs must be >= 0");
  if (epochs > 0 && (warmup_epochs < 0 || warmup_epochs >= epochs)) {
    throw InputError("train: require 0 <= warmup_epochs < epochs");
  }
  if (!(base_lr > 0.0)) throw InputError("train: base_lr must be > 0");
  // lr_scale = 0 is allowed: it freezes the parameters.
  if (lr_scale < 0.0) throw InputError("train: lr_scale must be >= 0");
  if (batch_size < 1) throw InputError("train: batch_size must be >= 1");
  if (mixup_probability < 0.0 || mixup_probability > 1.0) {
    throw InputError("train: mixup_probability must be in [0,1]");
  }
  augment.validate();
}

FeatureVector time_average_features(const RasterGrid& grid, Derivatized d) {
  if (grid.config.representation != Representation::mass_by_time) {
    throw InputError("time_average_features expects a mass_by_time grid");
  }
  FeatureVector f;
  // Summing each row in sorted order makes the mean exactly invariant
  // under any permutation of the time columns.
  std::vector<double> scratch(size_t(grid.cols));
  for (int m = 0; m < grid.rows; ++m) {
    const double* row = grid.row_ptr(m);
    std::copy(row, row + grid.cols, scratch.begin());
    std::sort(scratch.begin(), scratch.end());
    double sum = 0.0;
    for (double v : scratch) sum += v;
    f.v[size_t(m)] = sum / grid.cols;
  }
  switch (d) {
    case Derivatized::yes: f.v[kMassBins] = 1.0; break;
    case Derivatized::no: f.v[kMassBins + 1] = 1.0; break;
    case Derivatized::unknown: break;
  }
  return f;
}

std::array<double, kNumLabels> predict(const ModelParams& params,
                                       const FeatureVector& features) {
  params.validate();
  return forward(params, features);
}

double bce_loss(const std::array<double, kNumLabels>& probs,
                const std::array<double, kNumLabels>& targets) {
  double acc = 0.0;
  for (int k = 0; k < kNumLabels; ++k) {
    const double p = clipped(probs[size_t(k)]);
    const double y = targets[size_t(k)];
    acc += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return acc / kNumLabels;
}

LossGradients loss_gradients(const ModelParams& params,
                             const FeatureVector& features,
                             const std::array<double, kNumLabels>& targets) {
  LossGradients g;
  g.d_weights.assign(size_t(kNumLabels) * kFeatureDim, 0.0);
  const auto p = forward(params, features);
  g.loss = bce_loss(p, targets);
  for (int k = 0; k < kNumLabels; ++k) {
    const double dz = (p[size_t(k)] - targets[size_t(k)]) / kNumLabels;
    kernels::axpy(g.d_weights.data() + size_t(k) * kFeatureDim,
                  features.v.data(), dz, kFeatureDim);
    g.d_bias[size_t(k)] = dz;
  }
  return g;
}

double lr_at(double step_fraction, const TrainConfig& config) {
  const double s = std::clamp(step_fraction, 0.0, 1.0);
  const double epochs = std::max(config.epochs, 1);
  const double warmup_fraction = config.warmup_epochs / epochs;
  if (warmup_fraction > 0.0 && s < warmup_fraction) {
    return config.base_lr * (s / warmup_fraction);
  }
  const double u = (s - warmup_fraction) / (1.0 - warmup_fraction);
  return config.base_lr * 0.5 * (1.0 + std::cos(M_PI * u));
}

TrainResult train(const std::vector<TrainingExample>& dataset,
                  const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) {
    throw InputError("train: no labeled training samples");
  }

  TrainResult result;
  result.params = ModelParams::zeros();
  if (config.epochs == 0) return result;

  const size_t n = dataset.size();

  // Clean base features, used for the per-epoch loss trace.
  std::vector<FeatureVector> base_features(n);
  for (size_t i = 0; i < n; ++i) {
    base_features[i] =
        time_average_features(dataset[i].grid, dataset[i].derivatized);
  }

  Rng rng = Rng(config.rng_seed).substream("train");
  const size_t batch = size_t(config.batch_size);
  const size_t steps_per_epoch = (n + batch - 1) / batch;
  const size_t total_steps = size_t(config.epochs) * steps_per_epoch;
  const double lr_gain = config.lr_scale;

  std::vector<double>& w = result.params.weights;
  auto& b = result.params.bias;
  std::vector<double> dw(w.size());
  std::array<double, kNumLabels> db{};
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t(0));

  size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < n; start += batch) {
      const size_t count = std::min(batch, n - start);

      // Paper-style batch-wise time resize, then optional mixup across a
      // random in-batch pairing.
      const int size = sample_resize(config.augment, rng);
      std::vector<RasterGrid> grids(count);
      std::vector<std::array<double, kNumLabels>> targets(count);
      std::vector<std::array<double, 2>> deriv_onehot(count);
      for (size_t i = 0; i < count; ++i) {
        const TrainingExample& ex = dataset[order[start + i]];
        grids[i] = resize_time(ex.grid, size);
        targets[i] = ex.labels;
        deriv_onehot[i] = {ex.derivatized == Derivatized::yes ? 1.0 : 0.0,
                           ex.derivatized == Derivatized::no ? 1.0 : 0.0};
      }
      const double mix_draw = rng.next_unit();
      if (mix_draw < config.mixup_probability && count >= 2) {
        const double lambda = rng.next_beta(0.2, 0.2);
        std::vector<size_t> partner(count);
        std::iota(partner.begin(), partner.end(), size_t(0));
        rng.shuffle(partner);
        std::vector<RasterGrid> mixed(count);
        std::vector<std::array<double, kNumLabels>> mixed_targets(count);
        std::vector<std::array<double, 2>> mixed_onehot(count);
        for (size_t i = 0; i < count; ++i) {
          const size_t j = partner[i];
          auto [mg, ml] =
              mixup(grids[i], grids[j], targets[i], targets[j], lambda);
          mixed[i] = std::move(mg);
          mixed_targets[i] = ml;
          for (int h = 0; h < 2; ++h) {
            mixed_onehot[i][size_t(h)] =
                lambda * deriv_onehot[i][size_t(h)] +
                (1.0 - lambda) * deriv_onehot[j][size_t(h)];
          }
        }
        grids = std::move(mixed);
        targets = std::move(mixed_targets);
        deriv_onehot = std::move(mixed_onehot);
      }

      std::fill(dw.begin(), dw.end(), 0.0);
      db.fill(0.0);
      double batch_loss = 0.0;
      for (size_t i = 0; i < count; ++i) {
        FeatureVector x = time_average_features(grids[i], Derivatized::unknown);
        x.v[kMassBins] = deriv_onehot[i][0];
        x.v[kMassBins + 1] = deriv_onehot[i][1];
        const LossGradients g = loss_gradients(result.params, x, targets[i]);
        batch_loss += g.loss;
        kernels::axpy(dw.data(), g.d_weights.data(), 1.0, dw.size());
        for (int k = 0; k < kNumLabels; ++k) db[size_t(k)] += g.d_bias[size_t(k)];
      }
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("train: non-finite loss at step " +
                                 std::to_string(step));
      }

      const double lr =
          lr_at(double(step) / double(total_steps), config) * lr_gain;
      const double scale = -lr / double(count);
      kernels::axpy(w.data(), dw.data(), scale, w.size());
      for (int k = 0; k < kNumLabels; ++k) b[size_t(k)] += scale * db[size_t(k)];
      ++step;
    }

    double epoch_loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      epoch_loss +=
          bce_loss(forward(result.params, base_features[i]), dataset[i].labels);
    }
    epoch_loss /= double(n);
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("train: non-finite loss after epoch " +
                               std::to_string(epoch + 1));
    }
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

std::vector<double> saliency(const ModelParams& params,
                             const RasterGrid& grid, int label_index) {
  if (label_index < 0 || label_index >= kNumLabels) {
    throw InputError("saliency: label index must be in [0, 8]");
  }
  params.validate();
  std::vector<double> map(size_t(grid.rows) * grid.cols);
  for (int m = 0; m < grid.rows; ++m) {
    const double v = params.w(label_index, m) / grid.cols;
    std::fill(map.begin() + size_t(m) * grid.cols,
              map.begin() + size_t(m + 1) * grid.cols, v);
  }
  return map;
}

void save_params(const std::filesystem::path& path, const ModelParams& p) {
  p.validate();
  std::string out;
  out.append("GCMP", 4);
  binio::put_u32(out, 1);
  binio::put_u32(out, kNumLabels);
  binio::put_u32(out, kFeatureDim);
  for (double w : p.weights) binio::put_f64(out, w);
  for (double v : p.bias) binio::put_f64(out, v);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write params file: " + path.string());
  f.write(out.data(), std::streamsize(out.size()));
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open params file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  size_t pos = 0;
  if (data.size() < 16 || data.compare(0, 4, "GCMP") != 0) {
    throw InputError("not a GCMP params file: " + path.string());
  }
  pos = 4;
  const uint32_t version = binio::get_u32(data, pos);
  const uint32_t rows = binio::get_u32(data, pos);
  const uint32_t cols = binio::get_u32(data, pos);
  if (version != 1) {
    throw InputError("unsupported GCMP version " + std::to_string(version));
  }
  if (rows != kNumLabels || cols != kFeatureDim) {
    throw InputError("GCMP params have unexpected shape");
  }
  const size_t need = pos + (size_t(rows) * cols + rows) * 8;
  if (data.size() != need) {
    throw InputError("GCMP params file is truncated or oversized");
  }
  ModelParams p = ModelParams::zeros();
  for (double& w : p.weights) w = binio::get_f64(data, pos);
  for (double& v : p.bias) v = binio::get_f64(data, pos);
  p.validate();
  return p;
}

}  // namespace gcms
