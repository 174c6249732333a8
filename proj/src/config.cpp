#include "gcms/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gcms/errors.hpp"

namespace gcms {

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int64_t to_int(const std::string& key, const std::string& v) {
  int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError("config: key '" + key + "' needs an integer, got '" + v +
                     "'");
  }
  return out;
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError("config: key '" + key + "' needs an unsigned integer");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError("config: key '" + key + "' needs a number, got '" + v +
                     "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  throw InputError("config: key '" + key + "' needs 0/1 or true/false");
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());

  RunConfig cfg;
  bool saw_version = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "version") {
      if (to_int(key, value) != 1) {
        throw InputError("config: unsupported version " + value);
      }
      saw_version = true;
    } else if (key == "data_root") {
      cfg.data_root = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "seed") {
      cfg.seed = to_u64(key, value);
    } else if (key == "jobs") {
      cfg.jobs = int(to_int(key, value));
    } else if (key == "tta") {
      cfg.tta = to_bool(key, value);
    } else if (key == "time_slots") {
      cfg.raster.n_time_slots = int(to_int(key, value));
    } else if (key == "norm") {
      cfg.raster.norm = parse_norm_mode(value);
    } else if (key == "log") {
      cfg.raster.log = parse_log_mode(value);
    } else if (key == "channels") {
      cfg.raster.positional_channels = to_bool(key, value);
    } else if (key == "representation") {
      if (value == "mass_by_time") {
        cfg.raster.representation = Representation::mass_by_time;
      } else if (value == "intensity_by_time" || value == "swapped") {
        cfg.raster.representation = Representation::intensity_by_time;
      } else {
        throw InputError("config: unknown representation '" + value + "'");
      }
    } else if (key == "epochs") {
      cfg.train.epochs = int(to_int(key, value));
    } else if (key == "base_lr") {
      cfg.train.base_lr = to_double(key, value);
    } else if (key == "lr_scale") {
      cfg.train.lr_scale = to_double(key, value);
    } else if (key == "warmup_epochs") {
      cfg.train.warmup_epochs = int(to_int(key, value));
    } else if (key == "batch_size") {
      cfg.train.batch_size = int(to_int(key, value));
    } else if (key == "mixup_prob") {
      cfg.train.mixup_probability = to_double(key, value);
      cfg.train.augment.mixup_probability = cfg.train.mixup_probability;
    } else if (key == "resize_min") {
      cfg.train.augment.resize_min = int(to_int(key, value));
    } else if (key == "resize_max") {
      cfg.train.augment.resize_max = int(to_int(key, value));
    } else if (key == "warp") {
      cfg.train.augment.warp_enabled = to_bool(key, value);
    } else if (key == "warp_alpha_min") {
      cfg.train.augment.warp_alpha_min = to_double(key, value);
    } else if (key == "warp_alpha_max") {
      cfg.train.augment.warp_alpha_max = to_double(key, value);
    } else {
      throw InputError("config line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  if (!saw_version) {
    throw InputError("config file is missing the version key: " +
                     path.string());
  }
  cfg.propagate_seed();
  return cfg;
}

void RunConfig::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  out << "# gcms run configuration\n";
  out << "version = 1\n";
  out << "data_root = " << data_root.string() << "\n";
  out << "out_dir = " << out_dir.string() << "\n";
  out << "seed = " << seed << "\n";
  out << "jobs = " << jobs << "\n";
  out << "tta = " << (tta ? 1 : 0) << "\n";
  out << "\n# raster\n";
  out << "time_slots = " << raster.n_time_slots << "\n";
  out << "norm = " << to_string(raster.norm) << "\n";
  out << "log = " << to_string(raster.log) << "\n";
  out << "channels = " << (raster.positional_channels ? 1 : 0) << "\n";
  out << "representation = "
      << (raster.representation == Representation::mass_by_time
              ? "mass_by_time"
              : "intensity_by_time")
      << "\n";
  out << "\n# training; effective step size = base_lr * lr_scale.\n";
  out << "# base_lr mirrors the deep-backbone recipe; the linear head\n";
  out << "# needs the larger scaled step.\n";
  out << "epochs = " << train.epochs << "\n";
  out << "base_lr = " << train.base_lr << "\n";
  out << "lr_scale = " << train.lr_scale << "\n";
  out << "warmup_epochs = " << train.warmup_epochs << "\n";
  out << "batch_size = " << train.batch_size << "\n";
  out << "mixup_prob = " << train.mixup_probability << "\n";
  out << "resize_min = " << train.augment.resize_min << "\n";
  out << "resize_max = " << train.augment.resize_max << "\n";
  out << "warp = " << (train.augment.warp_enabled ? 1 : 0) << "\n";
  out << "warp_alpha_min = " << train.augment.warp_alpha_min << "\n";
  out << "warp_alpha_max = " << train.augment.warp_alpha_max << "\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write config file: " + path.string());
  f << out.str();
}

void RunConfig::propagate_seed() {
  train.rng_seed = seed;
  train.augment.rng_seed = seed;
}

}  // namespace gcms
