#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "gcms/errors.hpp"
#include "gcms/raster.hpp"
#include "gcms/rng.hpp"

using namespace gcms;

namespace {

RawSample make_sample(std::vector<IonReading> readings,
                      const std::string& id = "T") {
  RawSample s;
  s.sample_id = id;
  s.readings = std::move(readings);
  return s;
}

RawSample random_sample(Rng& rng, size_t n, double mass_hi = 280.0) {
  std::vector<IonReading> rs(n);
  for (auto& r : rs) {
    r.time_minutes = rng.next_range(0.0, 30.0);
    r.mass_mz = rng.next_range(0.5, mass_hi);
    r.intensity = rng.next_range(0.0, 1e6);
  }
  return make_sample(std::move(rs));
}

RasterGrid random_grid(Rng& rng, int cols = 48) {
  RasterGrid g;
  g.rows = kMassBins;
  g.cols = cols;
  g.config.n_time_slots = cols;
  g.r.resize(size_t(g.rows) * cols);
  for (double& v : g.r) {
    v = rng.next_unit() < 0.3 ? 0.0 : rng.next_unit();
  }
  return g;
}

// Independent brute-force oracle: group readings by (mass bin, time bin),
// then mean. Mirrors the published binning rules, not the implementation.
std::map<std::pair<int, int>, double> brute_force_cells(
    const RawSample& sample, int n_slots) {
  double tmin = sample.readings[0].time_minutes, tmax = tmin;
  double imax = 0.0;
  for (const auto& r : sample.readings) {
    tmin = std::min(tmin, r.time_minutes);
    tmax = std::max(tmax, r.time_minutes);
    imax = std::max(imax, r.intensity);
  }
  std::vector<uint32_t> order(sample.readings.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    const auto& ra = sample.readings[a];
    const auto& rb = sample.readings[b];
    if (ra.time_minutes != rb.time_minutes)
      return ra.time_minutes < rb.time_minutes;
    if (ra.mass_mz != rb.mass_mz) return ra.mass_mz < rb.mass_mz;
    return ra.intensity < rb.intensity;
  });

  std::map<std::pair<int, int>, std::vector<double>> groups;
  for (uint32_t idx : order) {
    const auto& r = sample.readings[idx];
    const int m = int(std::floor(r.mass_mz + 0.5));
    if (m > 255) continue;
    double t = tmax > tmin ? (r.time_minutes - tmin) / (tmax - tmin) : 0.0;
    int c = int(std::floor(t * n_slots));
    if (c >= n_slots) c = n_slots - 1;
    const double v = imax > 0.0 ? r.intensity / imax : 0.0;
    groups[{m, c}].push_back(v);
  }
  std::map<std::pair<int, int>, double> cells;
  for (const auto& [key, vals] : groups) {
    double sum = 0.0;
    for (double v : vals) sum += v;
    cells[key] = sum / double(vals.size());
  }
  return cells;
}

}  // namespace

TEST_CASE("normalize_time") {
  auto t = [](std::vector<double> times) {
    std::vector<IonReading> rs;
    for (double v : times) rs.push_back({v, 18.0, 1.0});
    return normalize_time(make_sample(std::move(rs)));
  };
  CHECK(t({0, 5, 10}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(t({3, 3, 3}) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(t({2, 4, 10}) == std::vector<double>{0.0, 0.25, 1.0});
}

TEST_CASE("normalize_intensity") {
  auto f = [](std::vector<double> is) {
    std::vector<IonReading> rs;
    for (double v : is) rs.push_back({1.0, 18.0, v});
    return normalize_intensity(make_sample(std::move(rs)));
  };
  CHECK(f({0, 50, 100}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(f({0, 0}) == std::vector<double>{0.0, 0.0});
  CHECK(f({2, 8}) == std::vector<double>{0.25, 1.0});
}

TEST_CASE("bin_to_grid hand-traced cases") {
  RasterConfig cfg;
  cfg.log = LogMode::linear;

  // Middle reading lands at normalized time 0.5 -> column 96, m/z 17.6
  // rounds to row 18, normalized intensity 1.
  const RawSample s = make_sample({{0.0, 50.0, 0.0},
                                   {5.0, 17.6, 7.0},
                                   {10.0, 50.0, 0.0}});
  const RasterGrid g = bin_to_grid(s, cfg);
  CHECK(g.at(18, 96) == 1.0);
  size_t nonzero = 0;
  for (double v : g.r) nonzero += v != 0.0;
  CHECK(nonzero == 1);
  CHECK(g.contributing_readings == 3);

  // Two readings in the same cell average.
  const RawSample s2 = make_sample({{0.0, 10.0, 0.0},
                                    {5.0, 30.0, 2.0},
                                    {5.0, 30.2, 4.0},
                                    {10.0, 10.0, 10.0}});
  const RasterGrid g2 = bin_to_grid(s2, cfg);
  CHECK(g2.at(30, 96) == doctest::Approx(0.3).epsilon(1e-12));

  // Out-of-range masses are dropped.
  const RawSample s3 = make_sample({{0.0, 300.0, 5.0}});
  const RasterGrid g3 = bin_to_grid(s3, cfg);
  CHECK(g3.contributing_readings == 0);
  CHECK(g3.dropped_mass_overflow == 1);
  for (double v : g3.r) CHECK(v == 0.0);
}

TEST_CASE("bin_to_grid equals the brute-force group-by oracle") {
  Rng rng(5150);
  RasterConfig cfg;
  cfg.log = LogMode::linear;
  for (int trial = 0; trial < 10; ++trial) {
    const RawSample s = random_sample(rng, size_t(rng.next_int(1, 1000)));
    const RasterGrid g = bin_to_grid(s, cfg);
    const auto cells = brute_force_cells(s, cfg.n_time_slots);
    size_t nonzero = 0;
    for (int m = 0; m < g.rows; ++m) {
      for (int c = 0; c < g.cols; ++c) {
        const auto it = cells.find({m, c});
        const double expect = it == cells.end() ? 0.0 : it->second;
        CHECK(std::abs(g.at(m, c) - expect) <= 1e-12);
        nonzero += g.at(m, c) != 0.0;
      }
    }
    (void)nonzero;
  }
}

TEST_CASE("bin_to_grid is independent of input row order") {
  Rng rng(777);
  RasterConfig cfg;
  RawSample s = random_sample(rng, 400);
  const RasterGrid a = bin_to_grid(s, cfg);
  rng.shuffle(s.readings);
  const RasterGrid b = bin_to_grid(s, cfg);
  CHECK(std::memcmp(a.r.data(), b.r.data(), a.r.size() * sizeof(double)) == 0);
}

TEST_CASE("conservation: contributing readings match a recount") {
  Rng rng(31337);
  RasterConfig cfg;
  for (int trial = 0; trial < 5; ++trial) {
    const RawSample s = random_sample(rng, 500);
    const RasterGrid g = bin_to_grid(s, cfg);
    int64_t in_range = 0;
    for (const auto& r : s.readings) {
      in_range += std::floor(r.mass_mz + 0.5) <= 255.0;
    }
    CHECK(g.contributing_readings == in_range);
    CHECK(g.contributing_readings + g.dropped_mass_overflow ==
          int64_t(s.readings.size()));
  }
}

TEST_CASE("apply_log endpoints and monotonicity") {
  CHECK(apply_log_value(0.0, LogMode::shifted) == 0.0);
  CHECK(apply_log_value(1.0, LogMode::shifted) == 1.0);
  CHECK(std::abs(std::log10(1001.0) - 3.000434077479319) < 1e-9);
  CHECK(apply_log_value(1e-4, LogMode::clipped) == 0.0);
  CHECK(apply_log_value(0.0, LogMode::clipped) == 0.0);  // clipped up to 1e-4
  CHECK(apply_log_value(1.0, LogMode::clipped) == 1.0);
  CHECK(apply_log_value(0.37, LogMode::linear) == 0.37);

  for (LogMode mode : {LogMode::shifted, LogMode::clipped}) {
    double prev = apply_log_value(0.0, mode);
    for (int i = 1; i <= 1000; ++i) {
      const double v = apply_log_value(i / 1000.0, mode);
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("normalize_mass and normalize_time_rows") {
  Rng rng(12);

  // Column example [0.2, 0.4] -> [0.5, 1.0].
  RasterGrid g;
  g.rows = kMassBins;
  g.cols = 2;
  g.config.n_time_slots = 2;
  g.r.assign(size_t(g.rows) * 2, 0.0);
  g.at(10, 0) = 0.2;
  g.at(20, 0) = 0.4;
  const RasterGrid gm = normalize_mass(g);
  CHECK(gm.at(10, 0) == 0.5);
  CHECK(gm.at(20, 0) == 1.0);
  for (int m = 0; m < gm.rows; ++m) CHECK(gm.at(m, 1) == 0.0);  // zero column

  // Row example [0.1, 0.2, 0.4] -> [0.25, 0.5, 1.0].
  RasterGrid h;
  h.rows = kMassBins;
  h.cols = 3;
  h.config.n_time_slots = 3;
  h.r.assign(size_t(h.rows) * 3, 0.0);
  h.at(5, 0) = 0.1;
  h.at(5, 1) = 0.2;
  h.at(5, 2) = 0.4;
  const RasterGrid ht = normalize_time_rows(h);
  CHECK(ht.at(5, 0) == 0.25);
  CHECK(ht.at(5, 1) == 0.5);
  CHECK(ht.at(5, 2) == 1.0);
  for (int c = 0; c < 3; ++c) CHECK(ht.at(6, c) == 0.0);  // zero row

  // Property: nonzero columns/rows peak at exactly 1; both idempotent.
  for (int trial = 0; trial < 25; ++trial) {
    RasterGrid grid = random_grid(rng);

    const RasterGrid a = normalize_mass(grid);
    for (int c = 0; c < a.cols; ++c) {
      double mx = 0.0;
      for (int m = 0; m < a.rows; ++m) mx = std::max(mx, a.at(m, c));
      if (mx > 0.0) CHECK(mx == 1.0);
    }
    const RasterGrid aa = normalize_mass(a);
    CHECK(std::memcmp(a.r.data(), aa.r.data(),
                      a.r.size() * sizeof(double)) == 0);

    const RasterGrid b = normalize_time_rows(grid);
    for (int m = 0; m < b.rows; ++m) {
      double mx = 0.0;
      for (int c = 0; c < b.cols; ++c) mx = std::max(mx, b.at(m, c));
      if (mx > 0.0) CHECK(mx == 1.0);
    }
    const RasterGrid bb = normalize_time_rows(b);
    CHECK(std::memcmp(b.r.data(), bb.r.data(),
                      b.r.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("encode_channels positional planes") {
  Rng rng(3);
  RasterGrid g = random_grid(rng, 192);
  g = encode_channels(std::move(g));
  CHECK(g.g[size_t(0) * 192 + 191] == 1.0);
  CHECK(g.g[size_t(100) * 192 + 0] == 0.0);
  CHECK(g.b[size_t(255) * 192 + 7] == 1.0);
  CHECK(g.b[size_t(0) * 192 + 7] == 0.0);

  RasterGrid h = random_grid(rng, 128);
  h = encode_channels(std::move(h));
  CHECK(h.g[size_t(9) * 128 + 64] == 64.0 / 127.0);
}

TEST_CASE("rasterize_swapped") {
  RasterConfig cfg;
  cfg.representation = Representation::intensity_by_time;
  cfg.log = LogMode::linear;

  // Single reading: max intensity -> top row, m/z 255 -> value 1.
  const RawSample s = make_sample({{0.0, 255.0, 5.0}});
  const RasterGrid g = rasterize_swapped(s, cfg);
  CHECK(g.at(255, 0) == 1.0);
  CHECK_FALSE(g.has_channels());

  // Collisions keep the largest mass.
  const RawSample s2 = make_sample({{0.0, 100.0, 5.0}, {0.0, 200.0, 5.0}});
  const RasterGrid g2 = rasterize_swapped(s2, cfg);
  CHECK(g2.at(255, 0) == 200.0 / 255.0);

  size_t nonzero = 0;
  for (double v : g2.r) nonzero += v != 0.0;
  CHECK(nonzero == 1);  // all other cells stay 0

  // The full pipeline routes the swapped representation.
  const RasterGrid g3 = rasterize(s2, cfg);
  CHECK(g3.at(255, 0) == 200.0 / 255.0);
}

TEST_CASE("raster config validation") {
  RasterConfig bad;
  bad.n_time_slots = 1;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.n_time_slots = 5000;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.n_time_slots = 192;
  bad.n_mass_bins = 128;
  CHECK_THROWS_AS(bad.validate(), InputError);

  RasterConfig swapped;
  swapped.representation = Representation::intensity_by_time;
  swapped.norm = NormMode::mass;
  CHECK_THROWS_AS(swapped.validate(), InputError);
  swapped.norm = NormMode::none;
  swapped.positional_channels = true;
  CHECK_THROWS_AS(swapped.validate(), InputError);

  CHECK_THROWS_AS(parse_norm_mode("bogus"), InputError);
  CHECK_THROWS_AS(parse_log_mode("bogus"), InputError);
}

TEST_CASE("full rasterize pipeline stays in [0,1] and is finite") {
  Rng rng(41);
  for (NormMode norm : {NormMode::none, NormMode::mass, NormMode::time}) {
    for (LogMode log : {LogMode::shifted, LogMode::clipped, LogMode::linear}) {
      RasterConfig cfg;
      cfg.norm = norm;
      cfg.log = log;
      cfg.positional_channels = true;
      const RawSample s = random_sample(rng, 600);
      const RasterGrid g = rasterize(s, cfg);
      for (double v : g.r) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(g.has_channels());
    }
  }
}

TEST_CASE("temperature_scaled_slots") {
  TemperatureHint hint;
  hint.t_start = 0.0;
  hint.reference_t_end = 300.0;

  hint.t_end = 600.0;  // double the reference span
  CHECK(temperature_scaled_slots(hint, 192) == 384);
  hint.t_end = 300.0;
  CHECK(temperature_scaled_slots(hint, 192) == 192);
  hint.t_end = 150.0;
  CHECK(temperature_scaled_slots(hint, 192) == 96);

  hint.t_end = 0.0;
  CHECK_THROWS_AS(temperature_scaled_slots(hint, 192), InputError);
  hint.t_end = 600.0;
  hint.reference_t_end = 0.0;
  CHECK_THROWS_AS(temperature_scaled_slots(hint, 192), InputError);

  // Clamped into [2, 4096].
  hint.reference_t_end = 300.0;
  hint.t_end = 1.0;
  CHECK(temperature_scaled_slots(hint, 192) == 2);
  hint.t_end = 30000.0;
  CHECK(temperature_scaled_slots(hint, 192) == 4096);
}
