#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gcms/config.hpp"
#include "gcms/errors.hpp"
#include "gcms/gcr.hpp"
#include "gcms/ingest.hpp"
#include "gcms/png.hpp"
#include "gcms/raster.hpp"
#include "gcms/rng.hpp"
#include "gcms/synth.hpp"
#include "test_util.hpp"

using namespace gcms;
using testutil::TempDir;
using testutil::read_file;

namespace {

RasterGrid random_grid(Rng& rng, int cols, bool channels) {
  RasterGrid g;
  g.rows = kMassBins;
  g.cols = cols;
  g.config.n_time_slots = cols;
  g.r.resize(size_t(g.rows) * cols);
  for (double& v : g.r) v = rng.next_unit();
  if (channels) g = encode_channels(std::move(g));
  return g;
}

}  // namespace

TEST_CASE("GCR1 round-trip and header layout") {
  TempDir tmp("gcr");
  Rng rng(44);
  for (bool channels : {false, true}) {
    const RasterGrid g = random_grid(rng, 192, channels);
    const auto path = tmp.path / (channels ? "c.gcr1" : "p.gcr1");
    write_gcr(path, g);

    const std::string bytes = read_file(path);
    REQUIRE(bytes.size() ==
            16 + size_t(256) * 192 * (channels ? 3 : 1) * 4);
    CHECK(bytes.substr(0, 4) == "GCR1");
    CHECK(uint8_t(bytes[4]) == 0);  // 256 little-endian
    CHECK(uint8_t(bytes[5]) == 1);
    CHECK(uint8_t(bytes[8]) == 192);
    CHECK(uint8_t(bytes[12]) == (channels ? 3 : 1));

    const RasterGrid back = read_gcr(path);
    CHECK(back.rows == g.rows);
    CHECK(back.cols == g.cols);
    CHECK(back.has_channels() == channels);
    for (size_t i = 0; i < g.r.size(); ++i) {
      CHECK(back.r[i] == double(float(g.r[i])));  // f32 storage
    }
  }

  testutil::write_file(tmp.path / "junk.gcr1", "JUNKxxxxxxxxxxxxxxxx");
  CHECK_THROWS_AS(read_gcr(tmp.path / "junk.gcr1"), InputError);
  const std::string good = read_file(tmp.path / "p.gcr1");
  testutil::write_file(tmp.path / "short.gcr1", good.substr(0, 100));
  CHECK_THROWS_AS(read_gcr(tmp.path / "short.gcr1"), InputError);
}

TEST_CASE("PNG rendering") {
  TempDir tmp("png");

  // Uniform R=1 grid renders solid red.
  RasterGrid red;
  red.rows = kMassBins;
  red.cols = 8;
  red.config.n_time_slots = 8;
  red.r.assign(size_t(256) * 8, 1.0);
  const auto rgb = grid_to_rgb8(red, false);
  REQUIRE(rgb.size() == size_t(256) * 8 * 3);
  for (size_t i = 0; i < rgb.size(); i += 3) {
    CHECK(rgb[i] == 255);
    CHECK(rgb[i + 1] == 0);
    CHECK(rgb[i + 2] == 0);
  }

  // Orientation: default puts m/z 255 on top; --flip puts row 0 on top.
  RasterGrid g = red;
  g.r.assign(g.r.size(), 0.0);
  g.at(255, 0) = 1.0;
  const auto top = grid_to_rgb8(g, false);
  CHECK(top[0] == 255);  // first pixel row = mass row 255
  const auto bottom = grid_to_rgb8(g, true);
  CHECK(bottom[0] == 0);
  CHECK(bottom[size_t(255) * 8 * 3] == 255);

  // Positional channels land in G and B with exact saturation points.
  Rng rng(3);
  const RasterGrid pc = random_grid(rng, 192, true);
  const auto px = grid_to_rgb8(pc, false);
  // rightmost column of any row: G = 255
  CHECK(px[(size_t(0) * 192 + 191) * 3 + 1] == 255);
  CHECK(px[(size_t(0) * 192 + 0) * 3 + 1] == 0);
  // top image row is mass 255: B = 255; bottom image row mass 0: B = 0
  CHECK(px[(size_t(0) * 192 + 5) * 3 + 2] == 255);
  CHECK(px[(size_t(255) * 192 + 5) * 3 + 2] == 0);

  // Byte-deterministic files with a valid signature and IHDR.
  const auto p1 = tmp.path / "a.png";
  const auto p2 = tmp.path / "b.png";
  render_png(p1, pc, false);
  render_png(p2, pc, false);
  const std::string b1 = read_file(p1);
  CHECK(b1 == read_file(p2));
  CHECK(b1.substr(1, 3) == "PNG");
  // IHDR width/height big-endian at offsets 16..23: 192 x 256.
  CHECK(uint8_t(b1[18]) == 0);
  CHECK(uint8_t(b1[19]) == 192);
  CHECK(uint8_t(b1[22]) == 1);
  CHECK(uint8_t(b1[23]) == 0);
}

TEST_CASE("run config round-trip and validation") {
  TempDir tmp("cfg");
  RunConfig cfg;
  cfg.data_root = "somewhere";
  cfg.seed = 99;
  cfg.raster.norm = NormMode::mass;
  cfg.raster.log = LogMode::clipped;
  cfg.raster.n_time_slots = 256;
  cfg.train.epochs = 7;
  cfg.train.lr_scale = 1234.5;
  cfg.tta = true;
  cfg.propagate_seed();

  const auto path = tmp.path / "run.cfg";
  cfg.save(path);
  const RunConfig back = RunConfig::load(path);
  CHECK(back.data_root == cfg.data_root);
  CHECK(back.seed == 99);
  CHECK(back.train.rng_seed == 99);
  CHECK(back.raster.norm == NormMode::mass);
  CHECK(back.raster.log == LogMode::clipped);
  CHECK(back.raster.n_time_slots == 256);
  CHECK(back.train.epochs == 7);
  CHECK(back.train.lr_scale == 1234.5);
  CHECK(back.tta);

  testutil::write_file(tmp.path / "nover.cfg", "epochs = 3\n");
  CHECK_THROWS_AS(RunConfig::load(tmp.path / "nover.cfg"), InputError);
  testutil::write_file(tmp.path / "unknown.cfg",
                       "version = 1\nwat = 1\n");
  CHECK_THROWS_AS(RunConfig::load(tmp.path / "unknown.cfg"), InputError);
  testutil::write_file(tmp.path / "badver.cfg", "version = 9\n");
  CHECK_THROWS_AS(RunConfig::load(tmp.path / "badver.cfg"), InputError);
  testutil::write_file(tmp.path / "comment.cfg",
                       "# hello\nversion = 1\n\nepochs = 3  # trailing\n");
  CHECK(RunConfig::load(tmp.path / "comment.cfg").train.epochs == 3);
}

TEST_CASE("synthetic dataset generator") {
  TempDir tmp("synth");

  SynthConfig bad;
  bad.n_samples = 5;
  CHECK_THROWS_AS(bad.validate(), InputError);

  SynthConfig cfg;
  cfg.n_samples = 12;
  cfg.seed = 31;

  const DatasetManifest m1 = generate_dataset(cfg, tmp.path / "a");
  const DatasetManifest m2 = generate_dataset(cfg, tmp.path / "b");
  CHECK(m1.entries.size() == 12);

  // Byte-identical across runs with the same seed.
  CHECK(read_file(tmp.path / "a" / "labels.csv") ==
        read_file(tmp.path / "b" / "labels.csv"));
  CHECK(read_file(tmp.path / "a" / "metadata.csv") ==
        read_file(tmp.path / "b" / "metadata.csv"));
  CHECK(read_file(tmp.path / "a" / "samples" / "S0001.csv") ==
        read_file(tmp.path / "b" / "samples" / "S0001.csv"));

  SynthConfig other = cfg;
  other.seed = 32;
  generate_dataset(other, tmp.path / "c");
  CHECK(read_file(tmp.path / "a" / "samples" / "S0001.csv") !=
        read_file(tmp.path / "c" / "samples" / "S0001.csv"));
}

TEST_CASE("zero-noise synth labels are recoverable by a peak detector") {
  TempDir tmp("synthoracle");
  SynthConfig cfg;
  cfg.n_samples = 30;
  cfg.seed = 5;
  cfg.noise_level = 0.0;
  const DatasetManifest manifest = generate_dataset(cfg, tmp.path);

  for (const auto& entry : manifest.entries) {
    const RawSample s = parse_sample_csv(tmp.path / entry.csv_path);
    REQUIRE(entry.labels.has_value());
    for (int k = 0; k < kNumLabels; ++k) {
      const auto sig = label_signature_masses(k);
      double peak = 0.0;
      for (const auto& r : s.readings) {
        const int mz = int(std::floor(r.mass_mz + 0.5));
        for (int m : sig) {
          if (mz == m) peak = std::max(peak, r.intensity);
        }
      }
      const bool detected = peak > 0.0;
      CHECK(detected == (entry.labels->values[size_t(k)] != 0));
    }
  }

  // Signature masses are disjoint across labels and avoid the background.
  std::vector<int> all;
  for (int k = 0; k < kNumLabels; ++k) {
    for (int m : label_signature_masses(k)) {
      CHECK(m != 18);
      CHECK(m != 44);
      CHECK(m <= 255);
      all.push_back(m);
    }
  }
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}
