#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lightatom/optics.hpp"
#include "lightatom/spectra.hpp"

namespace lightatom {

struct ThermalState {
  std::array<double, 3> temperature = {0.0, 0.0, 0.0};  // K, per axis (x, y, z)
  std::uint64_t photons_scattered = 0;

  void validate() const;
};

/// Monte-Carlo thermally averaged transmission on a detuning grid.
struct SampledSpectrum {
  std::vector<double> detunings;  // ω_p − ω_0, rad/s
  std::vector<double> mean_transmission;
  std::vector<double> standard_error;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Everything the thermal average needs besides the state and the grid.
/// `base` supplies Γ, φ and the overlap at the trap centre; its shift is
/// replaced by ω_z + ω_ac(r) for every sample.
struct ThermalModel {
  AtomSpecies species = AtomSpecies::rb87();
  TrapConfig trap;
  OpticalSystem system;
  FieldShifts shifts;
  LineshapeParams base;
};

enum class Backend { serial, openmp };

/// One row of a recoil-heating sweep. `error` is empty when the fit succeeded.
struct SweepPoint {
  std::uint64_t photons = 0;
  ThermalState state;
  double linewidth = 0.0;
  double shift = 0.0;
  double overlap = 0.0;
  double phase = 0.0;
  double extinction = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

namespace thermal {

/// σ = √(k_B T / (m ω²))
double positional_sigma(double temperature, double trap_frequency, double mass);
std::array<double, 3> positional_sigmas(const ThermalState& state, const TrapConfig& trap,
                                        double mass);

/// Standard-normal triple for sample `index`; a pure function of (seed, index).
Vec3 unit_normal_position(std::uint64_t seed, std::uint64_t index);

/// Independent Gaussian position draws in the harmonic trap.
std::vector<Vec3> sample_positions(const ThermalState& state, const TrapConfig& trap,
                                   const AtomSpecies& species, std::size_t n, std::uint64_t seed);

/// Applies the energy ledger of n recoil events: 4/3 E_r along the probe
/// axis, 1/3 E_r along each radial axis, k_B ΔT_i = ΔE_i.
ThermalState recoil_heat(const ThermalState& state, std::uint64_t n_photons,
                         const AtomSpecies& species);

/// Λ_eff = (1 − α)Λ
double effective_overlap(double overlap, double alpha);

/// ⟨τ⟩ over the thermal position distribution with Λ(r) and δω(r) = ω_z + ω_ac(r).
/// Identical output for identical (inputs, seed, n_samples) on either backend
/// and for any OpenMP thread count (the two backends agree to rounding).
SampledSpectrum thermal_average_transmission(const ThermalState& state, const ThermalModel& model,
                                             std::span<const double> detunings,
                                             std::size_t n_samples, std::uint64_t seed,
                                             Backend backend = Backend::openmp);

/// For each cumulative photon count: heat, average, fit. A failed fit is
/// recorded on its point and the sweep continues.
std::vector<SweepPoint> heating_sweep(const ThermalState& initial, const ThermalModel& model,
                                      std::span<const std::uint64_t> photon_schedule,
                                      std::span<const double> detunings, std::size_t n_samples,
                                      std::uint64_t seed, Backend backend = Backend::openmp);

}  // namespace thermal
}  // namespace lightatom
