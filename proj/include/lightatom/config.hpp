#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "lightatom/photon_sim.hpp"
#include "lightatom/thermal.hpp"

namespace lightatom {

struct SaturationScan {
  double saturation_power = 0.0;  // W
  double efficiency = 0.0;
  std::vector<double> powers;     // W
  double duration = 0.0;          // s
  std::size_t repetitions = 1;
};

struct SweepConfig {
  std::vector<std::uint64_t> schedule;
  std::vector<double> detunings;  // rad/s
};

/// A validated run configuration. `document` is the fully resolved JSON in
/// user units (MHz, pW, µK, mm, ...) with every default filled in; the SI
/// members are derived from it and from nothing else, so resolving the
/// document a second time gives identical values.
struct RunConfig {
  nlohmann::json document;

  std::uint64_t seed = 1;
  std::size_t samples = 100000;

  AtomSpecies species;
  OpticalSystem system;
  DetectorConfig detector;
  TrapConfig trap;
  FieldShifts shifts;
  LineshapeParams lineshape;  // stationary lineshape at the trap centre

  ThermalState thermal;
  double alpha = 0.0;

  PulseConfig pulse;
  bool pulse_heating = false;
  double peak_backscatter = 0.0;

  std::optional<SaturationScan> saturation;
  SweepConfig sweep;

  bool thermal_enabled() const;
  ThermalModel thermal_model() const;
};

/// Throws ConfigError naming the offending key for unknown keys, wrong types
/// and out-of-range values.
RunConfig resolve_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace lightatom
