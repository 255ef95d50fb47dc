#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lightatom/config.hpp"
#include "lightatom/fitting.hpp"

namespace lightatom::cli {

enum class Format { csv, json };

Format parse_format(std::string_view name);

struct OverlapReport {
  double focusing_strength = 0.0;
  double overlap = 0.0;
  double extinction = 0.0;
  double ideal_saturation_power = 0.0;  // W
  double focal_waist = 0.0;             // m
  double focal_rayleigh_range = 0.0;    // m
  double alpha = 0.0;
  double effective_overlap = 0.0;
};

OverlapReport overlap_report(const RunConfig& config);

/// Prints the report to `out`; also writes overlap.{csv,json} when out_dir is set.
std::vector<std::filesystem::path> cmd_overlap(const RunConfig& config,
                                               const std::filesystem::path& out_dir, Format format,
                                               std::ostream& out);

/// Truth spectrum, raw counts, transmission and backscatter spectra, and
/// (when configured) heating-binned spectra and a saturation scan.
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& config,
                                                const std::filesystem::path& out_dir, Format format);

std::vector<std::filesystem::path> cmd_heating_sweep(const RunConfig& config,
                                                     const std::filesystem::path& out_dir,
                                                     Format format);

struct FitReport {
  nlohmann::json document;
  fit::FitResult result;
  std::size_t excluded_rows = 0;
};

/// Fits rows given in user units (MHz or pW on x). `input` is the embedded
/// provenance block: model, rows, natural linewidth and source metadata.
FitReport fit_report(const nlohmann::json& input);

/// Reads a CSV/JSON table whose first three columns are x, y, σ and writes
/// fit_<model>.json into out_dir.
std::vector<std::filesystem::path> cmd_fit(const std::filesystem::path& data, const std::string& model,
                                           const std::filesystem::path& out_dir);

/// Re-runs the command recorded in an artifact, writing into out_dir.
std::vector<std::filesystem::path> cmd_replay(const std::filesystem::path& artifact,
                                              const std::filesystem::path& out_dir);

}  // namespace lightatom::cli
