#include "gcms/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gcms/errors.hpp"

namespace gcms {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      return out;
    }
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !cell.empty();
}

// getline with \r\n tolerance.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void record_reject(ParseStats* stats, size_t line_no, const std::string& why) {
  if (!stats) return;
  ++stats->rows_rejected;
  if (stats->row_errors.size() < kMaxRecordedRowErrors) {
    stats->row_errors.emplace_back(line_no, why);
  }
}

}  // namespace

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

const char* to_string(Derivatized d) {
  switch (d) {
    case Derivatized::yes: return "1";
    case Derivatized::no: return "0";
    case Derivatized::unknown: return "";
  }
  return "";
}

RawSample parse_sample_csv(const std::filesystem::path& path,
                           ParseStats* stats) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open sample CSV: " + path.string());
  }

  std::string line;
  if (!next_line(in, line)) {
    throw InputError("sample CSV has no header row: " + path.string());
  }

  int time_col = -1, mass_col = -1, intensity_col = -1;
  const auto header = split_csv(line);
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(header[i]);
    if (name == "time") time_col = int(i);
    else if (name == "mass") mass_col = int(i);
    else if (name == "intensity") intensity_col = int(i);
  }
  if (time_col < 0 || mass_col < 0 || intensity_col < 0) {
    throw InputError("sample CSV missing time/mass/intensity column: " +
                     path.string());
  }
  const size_t need =
      size_t(std::max({time_col, mass_col, intensity_col})) + 1;

  RawSample sample;
  sample.sample_id = path.stem().string();

  size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (stats) ++stats->rows_total;

    const auto cells = split_csv(line);
    if (cells.size() < need) {
      record_reject(stats, line_no, "too few fields");
      continue;
    }
    IonReading r;
    if (!parse_double(cells[size_t(time_col)], r.time_minutes) ||
        !parse_double(cells[size_t(mass_col)], r.mass_mz) ||
        !parse_double(cells[size_t(intensity_col)], r.intensity)) {
      record_reject(stats, line_no, "unparsable numeric cell");
      continue;
    }
    if (!std::isfinite(r.time_minutes) || !std::isfinite(r.mass_mz) ||
        !std::isfinite(r.intensity)) {
      record_reject(stats, line_no, "non-finite value");
      continue;
    }
    if (r.time_minutes < 0.0 || r.mass_mz <= 0.0 || r.intensity < 0.0) {
      record_reject(stats, line_no, "value out of domain");
      continue;
    }
    sample.readings.push_back(r);
  }

  if (sample.readings.empty()) {
    throw InputError("sample CSV has no valid readings: " + path.string());
  }
  std::stable_sort(sample.readings.begin(), sample.readings.end(),
                   [](const IonReading& a, const IonReading& b) {
                     return a.time_minutes < b.time_minutes;
                   });
  return sample;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

void write_sample_csv(const std::filesystem::path& path,
                      const RawSample& sample) {
  std::string out = "time,mass,intensity\n";
  for (const IonReading& r : sample.readings) {
    append_double(out, r.time_minutes);
    out.push_back(',');
    append_double(out, r.mass_mz);
    out.push_back(',');
    append_double(out, r.intensity);
    out.push_back('\n');
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write sample CSV: " + path.string());
  f << out;
}

std::pair<std::array<std::string, kNumLabels>,
          std::vector<std::pair<std::string, LabelVector>>>
read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open labels CSV: " + path.string());

  std::string line;
  if (!next_line(in, line)) {
    throw InputError("labels CSV has no header: " + path.string());
  }
  const auto header = split_csv(line);
  if (header.size() != kNumLabels + 1 || lower(header[0]) != "sample_id") {
    throw InputError("labels CSV header must be sample_id plus " +
                     std::to_string(kNumLabels) + " label columns: " +
                     path.string());
  }
  std::array<std::string, kNumLabels> names;
  for (int i = 0; i < kNumLabels; ++i) names[size_t(i)] = header[size_t(i) + 1];

  std::vector<std::pair<std::string, LabelVector>> rows;
  std::set<std::string> seen;
  size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != kNumLabels + 1) {
      throw InputError("labels CSV line " + std::to_string(line_no) +
                       ": expected " + std::to_string(kNumLabels + 1) +
                       " fields, got " + std::to_string(cells.size()));
    }
    if (!seen.insert(cells[0]).second) {
      throw InputError("labels CSV: duplicate sample_id " + cells[0]);
    }
    LabelVector lv;
    for (int i = 0; i < kNumLabels; ++i) {
      const std::string& c = cells[size_t(i) + 1];
      if (c == "0") lv.values[size_t(i)] = 0;
      else if (c == "1") lv.values[size_t(i)] = 1;
      else {
        throw InputError("labels CSV line " + std::to_string(line_no) +
                         ": label value must be 0 or 1, got '" + c + "'");
      }
    }
    rows.emplace_back(cells[0], lv);
  }
  return {names, rows};
}

void write_labels_csv(
    const std::filesystem::path& path,
    const std::array<std::string, kNumLabels>& label_names,
    const std::vector<std::pair<std::string, LabelVector>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write labels CSV: " + path.string());
  f << "sample_id";
  for (const auto& n : label_names) f << ',' << n;
  f << '\n';
  for (const auto& [id, lv] : rows) {
    f << id;
    for (uint8_t v : lv.values) f << ',' << int(v);
    f << '\n';
  }
}

void write_metadata_csv(
    const std::filesystem::path& path,
    const std::vector<std::tuple<std::string, Derivatized, Split>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write metadata CSV: " + path.string());
  f << "sample_id,derivatized,split\n";
  for (const auto& [id, d, s] : rows) {
    f << id << ',' << to_string(d) << ',' << to_string(s) << '\n';
  }
}

DatasetManifest parse_manifest(const std::filesystem::path& labels_path,
                               const std::filesystem::path& metadata_path) {
  auto [names, label_rows] = read_labels_csv(labels_path);

  std::ifstream in(metadata_path);
  if (!in) {
    throw InputError("cannot open metadata CSV: " + metadata_path.string());
  }
  std::string line;
  if (!next_line(in, line)) {
    throw InputError("metadata CSV has no header: " + metadata_path.string());
  }
  const auto header = split_csv(line);
  int id_col = -1, deriv_col = -1, split_col = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(header[i]);
    if (name == "sample_id") id_col = int(i);
    else if (name == "derivatized") deriv_col = int(i);
    else if (name == "split") split_col = int(i);
  }
  if (id_col < 0 || deriv_col < 0 || split_col < 0) {
    throw InputError(
        "metadata CSV missing sample_id/derivatized/split column: " +
        metadata_path.string());
  }

  DatasetManifest manifest;
  manifest.label_names = names;

  std::map<std::string, LabelVector> labels_by_id(label_rows.begin(),
                                                  label_rows.end());
  std::set<std::string> seen;
  size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const size_t need = size_t(std::max({id_col, deriv_col, split_col})) + 1;
    if (cells.size() < need) {
      throw InputError("metadata CSV line " + std::to_string(line_no) +
                       ": too few fields");
    }
    ManifestEntry e;
    e.sample_id = cells[size_t(id_col)];
    if (!seen.insert(e.sample_id).second) {
      throw InputError("metadata CSV: duplicate sample_id " + e.sample_id);
    }
    const std::string& d = cells[size_t(deriv_col)];
    if (d == "1") e.derivatized = Derivatized::yes;
    else if (d == "0") e.derivatized = Derivatized::no;
    else if (d.empty()) e.derivatized = Derivatized::unknown;
    else {
      throw InputError("metadata CSV line " + std::to_string(line_no) +
                       ": derivatized must be 0, 1 or empty, got '" + d + "'");
    }
    const std::string s = lower(cells[size_t(split_col)]);
    if (s == "train") e.split = Split::train;
    else if (s == "val") e.split = Split::val;
    else if (s == "test") e.split = Split::test;
    else {
      throw InputError("metadata CSV line " + std::to_string(line_no) +
                       ": split must be train/val/test, got '" + s + "'");
    }
    e.csv_path = "samples/" + e.sample_id + ".csv";
    if (auto it = labels_by_id.find(e.sample_id); it != labels_by_id.end()) {
      e.labels = it->second;
      labels_by_id.erase(it);
    }
    manifest.entries.push_back(std::move(e));
  }

  // Labeled ids missing from metadata become plain train entries.
  for (const auto& [id, lv] : labels_by_id) {
    ManifestEntry e;
    e.sample_id = id;
    e.csv_path = "samples/" + id + ".csv";
    e.labels = lv;
    e.split = Split::train;
    manifest.entries.push_back(std::move(e));
  }

  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.sample_id < b.sample_id;
            });
  return manifest;
}

}  // namespace gcms
