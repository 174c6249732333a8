// gcms: GCMS ion-count CSVs -> 2D rasters -> training/prediction/metrics.
//
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gcms/config.hpp"
#include "gcms/ensemble.hpp"
#include "gcms/errors.hpp"
#include "gcms/gcr.hpp"
#include "gcms/ingest.hpp"
#include "gcms/kernels.hpp"
#include "gcms/model.hpp"
#include "gcms/parallel.hpp"
#include "gcms/pipeline.hpp"
#include "gcms/png.hpp"
#include "gcms/raster.hpp"
#include "gcms/synth.hpp"

namespace fs = std::filesystem;
using namespace gcms;

namespace {

// Flag storage shared across subcommands; explicit flags override config
// file values, which override defaults.
struct CliState {
  std::string config_path;
  std::string data_root;
  std::string out;
  std::string params_file;
  uint64_t seed = 42;
  int jobs = 1;
  int time_slots = 192;
  std::string norm = "none";
  std::string log = "shifted";
  bool channels = false;
  bool swapped = false;
  bool tta = false;
  int epochs = 20;
  int batch_size = 8;
  int warmup_epochs = 2;
  double base_lr = 1e-4;
  double lr_scale = 5e5;
  double mixup_prob = 0.1;
  int resize_min = 128;
  int resize_max = 256;
  double clip_epsilon = 1e-4;
  int folds = 5;
  std::string split = "test";
  bool flip = false;
  int synth_n = 100;
  double synth_noise = 0.02;
  double synth_test_fraction = 0.0;
  std::vector<std::string> positional;
};

CliState opts;

void add_config_flag(CLI::App* sub) {
  sub->add_option("--config", opts.config_path,
                  "Run config file (flat key = value text)");
}

RunConfig resolve_config(CLI::App* sub) {
  RunConfig cfg;
  if (sub->count("--config")) {
    cfg = RunConfig::load(opts.config_path);
  }
  auto set = [&](const char* flag) {
    const CLI::Option* o = sub->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  if (set("--data")) cfg.data_root = opts.data_root;
  if (set("--out")) cfg.out_dir = opts.out;
  if (set("--seed")) cfg.seed = opts.seed;
  if (set("--jobs")) cfg.jobs = opts.jobs;
  if (set("--time-slots")) cfg.raster.n_time_slots = opts.time_slots;
  if (set("--norm")) cfg.raster.norm = parse_norm_mode(opts.norm);
  if (set("--log")) cfg.raster.log = parse_log_mode(opts.log);
  if (set("--channels")) cfg.raster.positional_channels = opts.channels;
  if (set("--swapped") && opts.swapped) {
    cfg.raster.representation = Representation::intensity_by_time;
  }
  if (set("--tta")) cfg.tta = opts.tta;
  if (set("--epochs")) cfg.train.epochs = opts.epochs;
  if (set("--batch-size")) cfg.train.batch_size = opts.batch_size;
  if (set("--warmup-epochs")) cfg.train.warmup_epochs = opts.warmup_epochs;
  if (set("--base-lr")) cfg.train.base_lr = opts.base_lr;
  if (set("--lr-scale")) cfg.train.lr_scale = opts.lr_scale;
  if (set("--mixup-prob")) {
    cfg.train.mixup_probability = opts.mixup_prob;
    cfg.train.augment.mixup_probability = opts.mixup_prob;
  }
  if (set("--resize-min")) cfg.train.augment.resize_min = opts.resize_min;
  if (set("--resize-max")) cfg.train.augment.resize_max = opts.resize_max;
  cfg.propagate_seed();
  return cfg;
}

void add_data_flags(CLI::App* sub) {
  add_config_flag(sub);
  sub->add_option("--data", opts.data_root,
                  "Dataset root (labels.csv, metadata.csv, samples/)");
  sub->add_option("--seed", opts.seed, "Run seed");
  sub->add_option("--jobs", opts.jobs, "Parallel worker count");
}

void add_raster_flags(CLI::App* sub) {
  sub->add_option("--time-slots", opts.time_slots,
                  "Time slots N_t (default 192)");
  sub->add_option("--norm", opts.norm, "Normalization: none|mass|time");
  sub->add_option("--log", opts.log, "Log transform: shifted|clipped|linear");
}

void add_train_flags(CLI::App* sub) {
  sub->add_option("--epochs", opts.epochs, "Training epochs");
  sub->add_option("--batch-size", opts.batch_size, "Mini-batch size");
  sub->add_option("--warmup-epochs", opts.warmup_epochs, "Warmup epochs");
  sub->add_option("--base-lr", opts.base_lr, "Schedule base learning rate");
  sub->add_option("--lr-scale", opts.lr_scale,
                  "Linear-head step multiplier (effective lr = base*scale)");
  sub->add_option("--mixup-prob", opts.mixup_prob, "Mixup probability");
  sub->add_option("--resize-min", opts.resize_min, "Smallest augment width");
  sub->add_option("--resize-max", opts.resize_max, "Largest augment width");
}

DatasetManifest load_manifest(const RunConfig& cfg) {
  return parse_manifest(cfg.data_root / "labels.csv",
                        cfg.data_root / "metadata.csv");
}

std::vector<int> tta_sizes(int base) {
  std::vector<int> sizes;
  for (int d = -64; d <= 64; d += 32) {
    sizes.push_back(std::clamp(base + d, 2, 4096));
  }
  return sizes;
}

int cmd_rasterize(CLI::App* sub) {
  RunConfig cfg = resolve_config(sub);
  const DatasetManifest manifest = load_manifest(cfg);

  std::vector<std::string> ids = opts.positional;
  if (ids.empty()) {
    for (const auto& e : manifest.entries) ids.push_back(e.sample_id);
  }
  std::sort(ids.begin(), ids.end());

  fs::create_directories(cfg.out_dir);

  struct Row {
    std::string summary;
    std::string warning;
    std::string error;
  };
  std::vector<Row> rows(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](size_t i) {
    Row& row = rows[i];
    try {
      const ManifestEntry* entry = manifest.find(ids[i]);
      if (!entry) {
        throw InputError("sample id not in manifest: " + ids[i]);
      }
      ParseStats stats;
      const RawSample sample =
          parse_sample_csv(cfg.data_root / entry->csv_path, &stats);
      if (stats.rows_rejected > 0) {
        row.warning = ids[i] + ": rejected " +
                      std::to_string(stats.rows_rejected) +
                      " malformed rows (first at line " +
                      std::to_string(stats.row_errors.front().first) + ": " +
                      stats.row_errors.front().second + ")";
      }
      const RasterGrid grid = rasterize(sample, cfg.raster);
      if (grid.contributing_readings == 0) {
        row.warning = ids[i] + ": every reading above m/z 255, grid is empty";
      }
      const fs::path out_path = cfg.out_dir / (ids[i] + ".gcr1");
      write_gcr(out_path, grid);

      size_t nonzero = 0;
      double max_v = 0.0;
      for (double v : grid.r) {
        if (v != 0.0) ++nonzero;
        max_v = std::max(max_v, v);
      }
      char buf[192];
      std::snprintf(buf, sizeof buf, "%s nonzero=%zu max=%.6f %s",
                    ids[i].c_str(), nonzero, max_v, out_path.string().c_str());
      row.summary = buf;
    } catch (const std::exception& e) {
      row.error = ids[i] + ": " + e.what();
    }
  });

  bool any_failed = false;
  for (const Row& row : rows) {
    if (!row.warning.empty()) std::cerr << "warning: " << row.warning << "\n";
    if (!row.error.empty()) {
      std::cerr << "error: " << row.error << "\n";
      any_failed = true;
    } else {
      std::cout << row.summary << "\n";
    }
  }
  return any_failed ? 1 : 0;
}

int cmd_render(CLI::App* sub) {
  if (!sub->count("--out")) throw InputError("render: --out PNG is required");
  const RasterGrid grid = read_gcr(opts.positional.at(0));
  render_png(opts.out, grid, opts.flip);
  std::cerr << "wrote " << opts.out << " (" << grid.cols << "x" << grid.rows
            << ")\n";
  return 0;
}

int cmd_synth(CLI::App* sub) {
  SynthConfig scfg;
  scfg.n_samples = opts.synth_n;
  scfg.seed = opts.seed;
  scfg.noise_level = opts.synth_noise;
  scfg.test_fraction = opts.synth_test_fraction;
  if (!sub->count("--out")) throw InputError("synth: --out DIR is required");

  const DatasetManifest manifest = generate_dataset(scfg, opts.out);

  RunConfig cfg;
  cfg.data_root = opts.out;
  cfg.seed = opts.seed;
  cfg.propagate_seed();
  cfg.save(fs::path(opts.out) / "run.cfg");

  std::cerr << "wrote " << manifest.entries.size() << " samples under "
            << opts.out << "\n";
  return 0;
}

int cmd_train(CLI::App* sub) {
  RunConfig cfg = resolve_config(sub);
  const DatasetManifest manifest = load_manifest(cfg);
  const auto examples = load_examples(manifest, cfg.data_root, cfg.raster,
                                      Split::train, true, cfg.jobs);
  std::cerr << "training on " << examples.size() << " labeled samples ("
            << kernels::backend_name(kernels::active_backend())
            << " kernels)\n";

  const TrainResult result = train(examples, cfg.train);
  for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
    std::cerr << "epoch " << e + 1 << "/" << result.epoch_loss.size()
              << " loss " << result.epoch_loss[e] << "\n";
  }

  fs::create_directories(cfg.out_dir);
  const fs::path params_path = cfg.out_dir / "params.gcmp";
  save_params(params_path, result.params);

  const fs::path trace_path = cfg.out_dir / "loss_trace.csv";
  std::ofstream trace(trace_path, std::ios::binary);
  if (!trace) throw InputError("cannot write " + trace_path.string());
  trace << "epoch,loss\n";
  char buf[64];
  for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.9f\n", e + 1, result.epoch_loss[e]);
    trace << buf;
  }

  std::snprintf(buf, sizeof buf, "%.6f",
                result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back());
  std::cout << "final training loss " << buf << "\n";
  std::cout << "params " << params_path.string() << "\n";
  std::cout << "trace " << trace_path.string() << "\n";
  return 0;
}

int cmd_predict(CLI::App* sub) {
  RunConfig cfg = resolve_config(sub);
  if (!sub->count("--params")) {
    throw InputError("predict: --params FILE is required");
  }
  if (!sub->count("--out")) throw InputError("predict: --out FILE is required");

  const ModelParams params = load_params(opts.params_file);
  const DatasetManifest manifest = load_manifest(cfg);

  std::optional<Split> split;
  if (opts.split == "train") split = Split::train;
  else if (opts.split == "val") split = Split::val;
  else if (opts.split == "test") split = Split::test;
  else if (opts.split != "all") {
    throw InputError("predict: --split must be train|val|test|all");
  }

  const auto examples = load_examples(manifest, cfg.data_root, cfg.raster,
                                      split, false, cfg.jobs);
  if (examples.empty()) {
    throw InputError("predict: no samples in the requested split");
  }

  std::vector<PredictionVector> preds(examples.size());
  const std::vector<int> sizes = tta_sizes(cfg.raster.n_time_slots);
  parallel_for(examples.size(), cfg.jobs, [&](size_t i) {
    const TrainingExample& ex = examples[i];
    if (cfg.tta) {
      preds[i] = tta_predict(params, ex.grid, ex.derivatized, sizes,
                             opts.clip_epsilon);
    } else {
      preds[i].sample_id = ex.sample_id;
      preds[i].probs =
          predict(params, time_average_features(ex.grid, ex.derivatized));
    }
  });

  write_predictions_csv(opts.out, preds, manifest.label_names);
  std::cerr << "wrote " << preds.size() << " predictions to " << opts.out
            << "\n";
  return 0;
}

int cmd_ensemble(CLI::App* sub) {
  if (!sub->count("--out")) {
    throw InputError("ensemble: --out FILE is required");
  }
  EnsembleSpec spec;
  spec.clip_epsilon = opts.clip_epsilon;
  std::array<std::string, kNumLabels> names{};
  for (size_t i = 0; i < opts.positional.size(); ++i) {
    auto [file_names, preds] = read_predictions_csv(opts.positional[i]);
    if (i == 0) {
      names = file_names;
    } else if (file_names != names) {
      throw InputError("ensemble: label columns differ between files");
    }
    spec.members.push_back(std::move(preds));
  }
  const auto combined = ensemble(spec);
  write_predictions_csv(opts.out, combined, names);
  std::cerr << "ensembled " << spec.members.size() << " member(s) over "
            << combined.size() << " samples\n";
  return 0;
}

int cmd_evaluate(CLI::App* sub) {
  (void)sub;
  auto [pred_names, preds] = read_predictions_csv(opts.positional.at(0));
  auto [label_names, labels] = read_labels_csv(opts.positional.at(1));
  const double loss = aggregated_log_loss(preds, labels, opts.clip_epsilon);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", loss);
  std::cout << buf << "\n";
  return 0;
}

int cmd_oof(CLI::App* sub) {
  RunConfig cfg = resolve_config(sub);
  const DatasetManifest manifest = load_manifest(cfg);
  const auto examples = load_examples(manifest, cfg.data_root, cfg.raster,
                                      Split::train, true, cfg.jobs);
  const KFoldResult result =
      kfold_oof(examples, opts.folds, cfg.train, cfg.tta, cfg.jobs);

  fs::create_directories(cfg.out_dir);
  const fs::path preds_path = cfg.out_dir / "oof_predictions.csv";
  write_predictions_csv(preds_path, result.oof, manifest.label_names);

  char buf[64];
  for (size_t f = 0; f < result.fold_loss.size(); ++f) {
    std::snprintf(buf, sizeof buf, "fold %zu loss %.6f", f,
                  result.fold_loss[f]);
    std::cout << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "overall loss %.6f", result.overall_loss);
  std::cout << buf << "\n";
  std::cerr << "wrote " << preds_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GCMS chromatography rasters, training and evaluation"};
  app.require_subcommand(1);

  CLI::App* rasterize = app.add_subcommand(
      "rasterize", "Convert manifest samples to GCR1 raster files");
  add_data_flags(rasterize);
  add_raster_flags(rasterize);
  rasterize->add_flag("--channels", opts.channels,
                      "Add positional G/B channels");
  rasterize->add_flag("--swapped", opts.swapped,
                      "Swapped intensity-by-time representation");
  rasterize->add_option("--out", opts.out, "Output directory");
  rasterize->add_option("ids", opts.positional, "Sample ids (default: all)");

  CLI::App* render =
      app.add_subcommand("render", "Render a GCR1 raster to an RGB PNG");
  render->add_option("raster", opts.positional, "Input .gcr1 file")
      ->required()
      ->expected(1);
  render->add_option("--out", opts.out, "Output PNG path");
  render->add_flag("--flip", opts.flip,
                   "Put m/z 0 on the top row (default: m/z 255 on top)");

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic labeled dataset with known signatures");
  synth->add_option("--n", opts.synth_n, "Sample count (>= 10)");
  synth->add_option("--seed", opts.seed, "Generator seed");
  synth->add_option("--noise", opts.synth_noise,
                    "Noise amplitude (0 = clean)");
  synth->add_option("--test-fraction", opts.synth_test_fraction,
                    "Fraction of samples tagged split=test");
  synth->add_option("--out", opts.out, "Output dataset directory");

  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train the time-averaged-head classifier on the train split");
  add_data_flags(train_cmd);
  add_raster_flags(train_cmd);
  add_train_flags(train_cmd);
  train_cmd->add_option("--out", opts.out, "Output directory");

  CLI::App* predict_cmd = app.add_subcommand(
      "predict", "Predict probabilities for a split with optional TTA");
  add_data_flags(predict_cmd);
  add_raster_flags(predict_cmd);
  predict_cmd->add_option("--params", opts.params_file, "GCMP params file");
  predict_cmd->add_option("--split", opts.split, "train|val|test|all");
  predict_cmd->add_flag("--tta", opts.tta,
                        "Average time sizes 5x32 around N_t");
  predict_cmd->add_option("--clip", opts.clip_epsilon, "Logit clip epsilon");
  predict_cmd->add_option("--out", opts.out, "Output predictions CSV");

  CLI::App* ensemble_cmd = app.add_subcommand(
      "ensemble", "Combine prediction CSVs by clipped-logit averaging");
  ensemble_cmd->add_option("files", opts.positional, "Prediction CSVs")
      ->required()
      ->expected(-1);
  ensemble_cmd->add_option("--clip", opts.clip_epsilon, "Clip epsilon");
  ensemble_cmd->add_option("--out", opts.out, "Output CSV");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Aggregated log loss of a predictions CSV against labels");
  evaluate->add_option("files", opts.positional, "predictions.csv labels.csv")
      ->required()
      ->expected(2);
  evaluate->add_option("--clip", opts.clip_epsilon, "Clip epsilon");

  CLI::App* oof =
      app.add_subcommand("oof", "K-fold out-of-fold training and evaluation");
  add_data_flags(oof);
  add_raster_flags(oof);
  add_train_flags(oof);
  oof->add_option("--k", opts.folds, "Fold count (default 5)");
  oof->add_flag("--tta", opts.tta, "TTA for held-out predictions");
  oof->add_option("--out", opts.out, "Output directory");

  try {
    app.parse(argc, argv);
    if (rasterize->parsed()) return cmd_rasterize(rasterize);
    if (render->parsed()) return cmd_render(render);
    if (synth->parsed()) return cmd_synth(synth);
    if (train_cmd->parsed()) return cmd_train(train_cmd);
    if (predict_cmd->parsed()) return cmd_predict(predict_cmd);
    if (ensemble_cmd->parsed()) return cmd_ensemble(ensemble_cmd);
    if (evaluate->parsed()) return cmd_evaluate(evaluate);
    if (oof->parsed()) return cmd_oof(oof);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
