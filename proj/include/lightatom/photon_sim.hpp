#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lightatom/spectra.hpp"
#include "lightatom/thermal.hpp"

namespace lightatom {

struct DetectorConfig {
  double eta_f = 0.56;          // forward detector efficiency
  double eta_b = 0.59;          // backward detector efficiency
  double eta_op = 0.59;         // transmission atom → D_f
  double background_f = 155.0;  // counts/s
  double background_b = 300.0;  // counts/s

  void validate() const;
};

struct PulseConfig {
  double duration = 20e-3;             // t_p, s
  double mean_incident_photons = 550;  // per pulse, at the atom
  std::vector<double> detunings;       // ω_p − ω_0, rad/s
  double bin_width = 0.5e-3;           // s; must divide the duration
  std::size_t repetitions = 1;         // pulses summed per detuning

  std::size_t bins() const;
  void validate() const;
};

/// Detector counts summed over all repetitions, laid out [detuning][time bin].
struct CountRecord {
  std::vector<double> detunings;
  std::size_t n_bins = 0;
  double bin_width = 0.0;
  std::size_t repetitions = 0;
  double mean_incident_photons = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> probe_f;
  std::vector<std::int64_t> reference_f;
  std::vector<std::int64_t> probe_b;
  std::vector<std::int64_t> reference_b;
  /// Expected scattered photons per pulse, cumulative to the end of each bin.
  std::vector<double> true_scattered;

  std::size_t index(std::size_t detuning, std::size_t bin) const { return detuning * n_bins + bin; }
};

/// Background-subtracted counts; may be negative.
struct CorrectedCounts {
  std::vector<double> probe_f;
  std::vector<double> reference_f;
  std::vector<double> probe_b;
  std::vector<double> reference_b;
};

/// What the atom does to the probe: τ at a detuning given the photons it has
/// already scattered in this pulse, and the backscatter probability.
struct TruthModel {
  std::size_t n_detunings = 0;
  std::function<double(std::size_t detuning, double scattered)> transmission;
  std::function<double(std::size_t detuning)> backscatter;

  static TruthModel stationary(const LineshapeParams& params, std::span<const double> detunings,
                               double peak_backscatter);
  static TruthModel sampled(const SampledSpectrum& spectrum, const LineshapeParams& centre,
                            double peak_backscatter);
  /// τ interpolated linearly in scattered photons between thermal spectra
  /// computed along a heating schedule; held at the last entry beyond it.
  static TruthModel heating_table(std::vector<std::uint64_t> schedule,
                                  std::vector<SampledSpectrum> table,
                                  const LineshapeParams& centre, double peak_backscatter);
};

/// One detuning of a spectrum built from counts.
struct SpectrumRow {
  double detuning = 0.0;
  double value = 0.0;  // transmission, or backscatter probability
  double sigma = 0.0;
  double probe = 0.0;      // corrected counts
  double reference = 0.0;  // corrected counts
  double scattered = 0.0;  // mean per pulse over the rows' bins
  bool flagged = false;    // insufficient counts
};

struct BinnedSpectrum {
  std::size_t group = 0;
  double scattered_low = 0.0;
  double scattered_high = 0.0;
  std::vector<SpectrumRow> rows;
};

struct SaturationRow {
  double incident_power = 0.0;  // W
  std::int64_t counts = 0;
  double rate = 0.0;   // background-corrected, photons/s
  double sigma = 0.0;
};

namespace photon {

CountRecord generate_run(const TruthModel& truth, const PulseConfig& pulse,
                         const DetectorConfig& det, std::uint64_t seed);

CorrectedCounts background_correct(const CountRecord& raw, const DetectorConfig& det);

/// n_s = (n_ref − n_p) / (η_f η_op)
double scattered_photons(double n_reference, double n_probe, const DetectorConfig& det);

/// Cumulative scattered photons per pulse at the end of each bin, one vector
/// per detuning, estimated from the corrected forward counts.
std::vector<std::vector<double>> scattered_ledger(const CountRecord& raw, const CorrectedCounts& corrected,
                                                  const DetectorConfig& det);

/// Σn_p / Σn_ref per detuning over the whole pulse with propagated Poisson errors.
/// Rows with no reference counts are flagged.
std::vector<SpectrumRow> transmission_spectrum(const CountRecord& raw, const CorrectedCounts& corrected,
                                               const DetectorConfig& det);

/// Backscatter probability per incident photon, P_b = n_b / (η_b N_inc).
std::vector<SpectrumRow> backscatter_spectrum(const CountRecord& raw, const CorrectedCounts& corrected,
                                              const DetectorConfig& det);

/// Regroups time bins of every detuning by scattered photons: a bin whose
/// midpoint ledger value lies in [g·w, (g+1)·w) goes to group g.
std::vector<BinnedSpectrum> rebin_by_scattered(const CountRecord& raw, const DetectorConfig& det,
                                               double bin_width = 30.0,
                                               double min_reference_counts = 1.0);

/// Resonant saturation scan: backward counts for each incident power.
std::vector<SaturationRow> generate_saturation_run(double saturation_power, double efficiency,
                                                   double natural_linewidth,
                                                   std::span<const double> powers, double duration,
                                                   std::size_t repetitions, double background_b,
                                                   std::uint64_t seed);

}  // namespace photon
}  // namespace lightatom
