#include "lightatom/artifacts.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lightatom/constants.hpp"
#include "lightatom/errors.hpp"

namespace lightatom::io {
namespace {

using nlohmann::json;
using constants::rad_s_to_mhz;

std::string number(double v) { return fmt::format("{}", v); }

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& cell, std::size_t line, const std::string& column) {
  const std::string t = trim(cell);
  if (t.empty()) throw IoError(fmt::format("line {}: empty value in column '{}'", line, column));
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    throw IoError(fmt::format("line {}: '{}' in column '{}' is not a number", line, t, column));
  return v;
}

json meta_json(const ArtifactMeta& m) {
  return json{{"command", m.command}, {"artifact", m.name}, {"seed", m.seed}, {"config", m.config}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_csv(const ArtifactMeta& meta, const Table& table) {
  std::string out;
  out += "# command: " + meta.command + "\n";
  out += "# artifact: " + meta.name + "\n";
  out += "# seed: " + std::to_string(meta.seed) + "\n";
  out += "# config: " + meta.config.dump() + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  if (!table.notes.empty()) out += ",note";
  out += "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + number(row[c]);
    if (!table.notes.empty()) out += "," + quote(table.notes[r]);
    out += "\n";
  }
  return out;
}

std::string to_json(const ArtifactMeta& meta, const Table& table) {
  json doc = meta_json(meta);
  doc["columns"] = table.columns;
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  if (!table.notes.empty()) doc["notes"] = table.notes;
  return doc.dump(2) + "\n";
}

Artifact parse_csv(std::string_view text) {
  Artifact a;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool has_notes = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto colon = t.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(std::string_view(t).substr(1, colon - 1));
      const std::string value = trim(std::string_view(t).substr(colon + 1));
      try {
        if (key == "command") a.meta.command = value, a.has_meta = true;
        else if (key == "artifact") a.meta.name = value;
        else if (key == "seed") a.meta.seed = std::stoull(value);
        else if (key == "config") a.meta.config = json::parse(value);
      } catch (const std::exception& e) {
        throw IoError(fmt::format("line {}: malformed metadata '{}': {}", line_no, key, e.what()));
      }
      continue;
    }
    auto cells = split_csv(t);
    if (!header_seen) {
      for (auto& c : cells) c = trim(c);
      has_notes = !cells.empty() && cells.back() == "note";
      if (has_notes) cells.pop_back();
      a.table.columns = std::move(cells);
      header_seen = true;
      continue;
    }
    const std::size_t expected = a.table.columns.size() + (has_notes ? 1 : 0);
    if (cells.size() != expected)
      throw IoError(fmt::format("line {}: expected {} fields, found {}", line_no, expected, cells.size()));
    std::vector<double> row;
    for (std::size_t c = 0; c < a.table.columns.size(); ++c)
      row.push_back(parse_double(cells[c], line_no, a.table.columns[c]));
    a.table.rows.push_back(std::move(row));
    if (has_notes) a.table.notes.push_back(cells.back());
  }
  if (!header_seen) throw IoError("empty input: no header row found");
  return a;
}

Artifact parse_json(std::string_view text) {
  Artifact a;
  try {
    const json doc = json::parse(text);
    a.has_meta = doc.contains("command");
    if (a.has_meta) {
      a.meta.command = doc.at("command").get<std::string>();
      a.meta.name = doc.value("artifact", "");
      a.meta.seed = doc.value("seed", std::uint64_t{0});
      a.meta.config = doc.value("config", json::object());
    }
    if (doc.contains("columns")) {
      a.table.columns = doc.at("columns").get<std::vector<std::string>>();
      for (const auto& r : doc.at("rows")) {
        std::vector<double> row;
        for (const auto& v : r) row.push_back(v.is_null() ? std::nan("") : v.get<double>());
        a.table.rows.push_back(std::move(row));
      }
      if (doc.contains("notes")) a.table.notes = doc.at("notes").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw IoError(fmt::format("malformed JSON artifact: {}", e.what()));
  }
  return a;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

Artifact read_artifact(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  return path.extension() == ".json" ? parse_json(text) : parse_csv(text);
}

Table count_table(const CountRecord& rec) {
  Table t;
  t.columns = {"detuning_mhz", "bin", "t_start_ms", "probe_f", "reference_f",
               "probe_b", "reference_b", "true_scattered"};
  for (std::size_t d = 0; d < rec.detunings.size(); ++d)
    for (std::size_t b = 0; b < rec.n_bins; ++b) {
      const auto i = rec.index(d, b);
      t.rows.push_back({rad_s_to_mhz(rec.detunings[d]), static_cast<double>(b),
                        static_cast<double>(b) * rec.bin_width * 1e3, static_cast<double>(rec.probe_f[i]),
                        static_cast<double>(rec.reference_f[i]), static_cast<double>(rec.probe_b[i]),
                        static_cast<double>(rec.reference_b[i]), rec.true_scattered[i]});
    }
  return t;
}

Table spectrum_table(const std::vector<SpectrumRow>& rows, const std::string& value_column) {
  Table t;
  t.columns = {"detuning_mhz", value_column, "sigma", "probe", "reference", "scattered", "flagged"};
  for (const auto& r : rows)
    t.rows.push_back({rad_s_to_mhz(r.detuning), r.value, r.sigma, r.probe, r.reference, r.scattered,
                      r.flagged ? 1.0 : 0.0});
  return t;
}

Table binned_table(const std::vector<BinnedSpectrum>& groups) {
  Table t;
  t.columns = {"detuning_mhz", "transmission", "sigma", "group", "scattered_low", "scattered_high",
               "scattered", "probe", "reference", "flagged"};
  for (const auto& g : groups)
    for (const auto& r : g.rows)
      t.rows.push_back({rad_s_to_mhz(r.detuning), r.value, r.sigma, static_cast<double>(g.group),
                        g.scattered_low, g.scattered_high, r.scattered, r.probe, r.reference,
                        r.flagged ? 1.0 : 0.0});
  return t;
}

Table sampled_table(const SampledSpectrum& s) {
  Table t;
  t.columns = {"detuning_mhz", "transmission", "standard_error"};
  for (std::size_t k = 0; k < s.detunings.size(); ++k)
    t.rows.push_back({rad_s_to_mhz(s.detunings[k]), s.mean_transmission[k], s.standard_error[k]});
  return t;
}

Table sweep_table(const std::vector<SweepPoint>& points) {
  Table t;
  t.columns = {"photons", "temperature_x_uk", "temperature_y_uk", "temperature_z_uk", "shift_mhz",
               "extinction", "linewidth_mhz", "overlap", "phase_rad", "ok"};
  for (const auto& p : points) {
    t.rows.push_back({static_cast<double>(p.photons), p.state.temperature[0] * 1e6,
                      p.state.temperature[1] * 1e6, p.state.temperature[2] * 1e6,
                      rad_s_to_mhz(p.shift), p.extinction, rad_s_to_mhz(p.linewidth), p.overlap,
                      p.phase, p.ok() ? 1.0 : 0.0});
    t.notes.push_back(p.error);
  }
  return t;
}

Table saturation_table(const std::vector<SaturationRow>& rows) {
  Table t;
  t.columns = {"power_pw", "rate_cps", "sigma", "counts"};
  for (const auto& r : rows)
    t.rows.push_back({r.incident_power * 1e12, r.rate, r.sigma, static_cast<double>(r.counts)});
  return t;
}

}  // namespace lightatom::io
