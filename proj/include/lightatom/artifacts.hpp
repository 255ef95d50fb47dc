#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lightatom/photon_sim.hpp"
#include "lightatom/thermal.hpp"

namespace lightatom::io {

/// Numeric table with an optional trailing free-text "note" column.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;  // empty, or one per row
};

/// Provenance carried by every artifact: the command that produced it, its
/// name within that command's outputs, the seed and the resolved config.
struct ArtifactMeta {
  std::string command;
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json config;
};

struct Artifact {
  bool has_meta = false;
  ArtifactMeta meta;
  Table table;
};

// CSV layout: '#'-prefixed metadata lines (command, artifact, seed, config as
// compact JSON), then one header row, then data rows. Comma separated, '.'
// decimal point, shortest round-trip number formatting.
std::string to_csv(const ArtifactMeta& meta, const Table& table);
std::string to_json(const ArtifactMeta& meta, const Table& table);

/// Throws IoError with a 1-based line number for malformed input.
Artifact parse_csv(std::string_view text);
Artifact parse_json(std::string_view text);
Artifact read_artifact(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Table count_table(const CountRecord& record);
Table spectrum_table(const std::vector<SpectrumRow>& rows, const std::string& value_column);
Table binned_table(const std::vector<BinnedSpectrum>& groups);
Table sampled_table(const SampledSpectrum& spectrum);
Table sweep_table(const std::vector<SweepPoint>& points);
Table saturation_table(const std::vector<SaturationRow>& rows);

}  // namespace lightatom::io
