#include "lightatom/photon_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lightatom/counter_rng.hpp"
#include "lightatom/errors.hpp"

namespace lightatom {

using detail::require;

void DetectorConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(unit(eta_f) && unit(eta_b) && unit(eta_op), "DetectorConfig: efficiencies must lie in [0, 1]");
  require(background_f >= 0.0 && background_b >= 0.0, "DetectorConfig: backgrounds must be non-negative");
}

std::size_t PulseConfig::bins() const {
  return static_cast<std::size_t>(std::llround(duration / bin_width));
}

void PulseConfig::validate() const {
  require(duration > 0.0, "PulseConfig: duration must be positive");
  require(bin_width > 0.0 && bin_width <= duration, "PulseConfig: bin width must lie in (0, duration]");
  require(std::fabs(static_cast<double>(bins()) * bin_width - duration) <= 1e-9 * duration,
          "PulseConfig: bin width must divide the pulse duration");
  require(mean_incident_photons >= 0.0, "PulseConfig: mean photon number must be non-negative");
  require(repetitions >= 1, "PulseConfig: need at least one repetition");
}

TruthModel TruthModel::stationary(const LineshapeParams& params, std::span<const double> detunings,
                                  double peak_backscatter) {
  params.validate();
  std::vector<double> grid(detunings.begin(), detunings.end());
  TruthModel t;
  t.n_detunings = grid.size();
  t.transmission = [params, grid](std::size_t d, double) {
    return spectra::transmission_at_detuning(params, grid[d]);
  };
  t.backscatter = [params, grid, peak_backscatter](std::size_t d) {
    return spectra::reflection(peak_backscatter, params.linewidth, params.shift, grid[d], 0.0);
  };
  return t;
}

TruthModel TruthModel::sampled(const SampledSpectrum& spectrum, const LineshapeParams& centre,
                               double peak_backscatter) {
  TruthModel t;
  t.n_detunings = spectrum.detunings.size();
  t.transmission = [tau = spectrum.mean_transmission](std::size_t d, double) { return tau[d]; };
  t.backscatter = [grid = spectrum.detunings, centre, peak_backscatter](std::size_t d) {
    return spectra::reflection(peak_backscatter, centre.linewidth, centre.shift, grid[d], 0.0);
  };
  return t;
}

TruthModel TruthModel::heating_table(std::vector<std::uint64_t> schedule,
                                     std::vector<SampledSpectrum> table,
                                     const LineshapeParams& centre, double peak_backscatter) {
  require(!schedule.empty() && schedule.size() == table.size(),
          "TruthModel::heating_table: one spectrum per schedule entry required");
  require(std::is_sorted(schedule.begin(), schedule.end()),
          "TruthModel::heating_table: schedule must be nondecreasing");
  TruthModel t;
  t.n_detunings = table.front().detunings.size();
  t.backscatter = [grid = table.front().detunings, centre, peak_backscatter](std::size_t d) {
    return spectra::reflection(peak_backscatter, centre.linewidth, centre.shift, grid[d], 0.0);
  };
  t.transmission = [schedule = std::move(schedule), table = std::move(table)](std::size_t d,
                                                                               double scattered) {
    const double s = std::max(scattered, 0.0);
    if (s >= static_cast<double>(schedule.back())) return table.back().mean_transmission[d];
    const auto upper = std::upper_bound(schedule.begin(), schedule.end(), s,
                                        [](double v, std::uint64_t e) { return v < static_cast<double>(e); });
    if (upper == schedule.begin()) return table.front().mean_transmission[d];
    const auto hi = static_cast<std::size_t>(upper - schedule.begin());
    const auto lo = hi - 1;
    const double x0 = static_cast<double>(schedule[lo]);
    const double x1 = static_cast<double>(schedule[hi]);
    const double w = (s - x0) / (x1 - x0);
    return (1.0 - w) * table[lo].mean_transmission[d] + w * table[hi].mean_transmission[d];
  };
  return t;
}

namespace photon {
namespace {

std::int64_t poisson(std::mt19937_64& engine, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(engine);
}

// Var(n_p/n_ref) for independent Poisson counts, using raw counts (signal
// plus background) as the variance of each corrected count.
double ratio_sigma(double ratio, double probe, double reference, double raw_probe, double raw_reference) {
  const double rel_p = probe != 0.0 ? raw_probe / (probe * probe) : 0.0;
  return std::fabs(ratio) * std::sqrt(rel_p + raw_reference / (reference * reference));
}

}  // namespace

CountRecord generate_run(const TruthModel& truth, const PulseConfig& pulse, const DetectorConfig& det,
                         std::uint64_t seed) {
  pulse.validate();
  det.validate();
  require(truth.n_detunings == pulse.detunings.size(),
          "generate_run: truth model and pulse disagree on the detuning grid");

  CountRecord rec;
  rec.detunings = pulse.detunings;
  rec.n_bins = pulse.bins();
  rec.bin_width = pulse.bin_width;
  rec.repetitions = pulse.repetitions;
  rec.mean_incident_photons = pulse.mean_incident_photons;
  rec.seed = seed;
  const std::size_t total = rec.detunings.size() * rec.n_bins;
  rec.probe_f.resize(total);
  rec.reference_f.resize(total);
  rec.probe_b.resize(total);
  rec.reference_b.resize(total);
  rec.true_scattered.resize(total);

  const double reps = static_cast<double>(pulse.repetitions);
  const double incident_per_bin = pulse.mean_incident_photons / static_cast<double>(rec.n_bins);
  const double forward_gain = det.eta_op * det.eta_f;
  const double bg_f = det.background_f * pulse.bin_width * reps;
  const double bg_b = det.background_b * pulse.bin_width * reps;

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t sd = 0; sd < static_cast<std::ptrdiff_t>(rec.detunings.size()); ++sd) {
    const auto d = static_cast<std::size_t>(sd);
    std::mt19937_64 engine(rng::derive_seed(seed, d));
    const double p_back = truth.backscatter(d);
    double scattered = 0.0;
    for (std::size_t b = 0; b < rec.n_bins; ++b) {
      const double tau = truth.transmission(d, scattered);
      const std::size_t i = rec.index(d, b);
      rec.reference_f[i] = poisson(engine, reps * incident_per_bin * forward_gain + bg_f);
      rec.probe_f[i] = poisson(engine, reps * tau * incident_per_bin * forward_gain + bg_f);
      rec.probe_b[i] = poisson(engine, reps * p_back * incident_per_bin * det.eta_b + bg_b);
      rec.reference_b[i] = poisson(engine, bg_b);
      scattered += incident_per_bin * (1.0 - tau);
      rec.true_scattered[i] = scattered;
    }
  }
  return rec;
}

CorrectedCounts background_correct(const CountRecord& raw, const DetectorConfig& det) {
  const double reps = static_cast<double>(raw.repetitions);
  const double bg_f = det.background_f * raw.bin_width * reps;
  const double bg_b = det.background_b * raw.bin_width * reps;
  CorrectedCounts out;
  auto subtract = [](const std::vector<std::int64_t>& in, double bg) {
    std::vector<double> v(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) v[i] = static_cast<double>(in[i]) - bg;
    return v;
  };
  out.probe_f = subtract(raw.probe_f, bg_f);
  out.reference_f = subtract(raw.reference_f, bg_f);
  out.probe_b = subtract(raw.probe_b, bg_b);
  out.reference_b = subtract(raw.reference_b, bg_b);
  return out;
}

double scattered_photons(double n_reference, double n_probe, const DetectorConfig& det) {
  require(det.eta_f > 0.0 && det.eta_op > 0.0,
          "scattered_photons: forward efficiency and path transmission must be positive");
  return (n_reference - n_probe) / (det.eta_f * det.eta_op);
}

std::vector<std::vector<double>> scattered_ledger(const CountRecord& raw, const CorrectedCounts& c,
                                                  const DetectorConfig& det) {
  const double reps = static_cast<double>(raw.repetitions);
  std::vector<std::vector<double>> out(raw.detunings.size(), std::vector<double>(raw.n_bins));
  for (std::size_t d = 0; d < raw.detunings.size(); ++d) {
    double ref = 0.0, probe = 0.0;
    for (std::size_t b = 0; b < raw.n_bins; ++b) {
      ref += c.reference_f[raw.index(d, b)];
      probe += c.probe_f[raw.index(d, b)];
      out[d][b] = scattered_photons(ref, probe, det) / reps;
    }
  }
  return out;
}

std::vector<SpectrumRow> transmission_spectrum(const CountRecord& raw, const CorrectedCounts& c,
                                               const DetectorConfig& det) {
  const auto ledger = scattered_ledger(raw, c, det);
  std::vector<SpectrumRow> rows;
  for (std::size_t d = 0; d < raw.detunings.size(); ++d) {
    SpectrumRow row;
    row.detuning = raw.detunings[d];
    double raw_p = 0.0, raw_r = 0.0;
    for (std::size_t b = 0; b < raw.n_bins; ++b) {
      const auto i = raw.index(d, b);
      row.probe += c.probe_f[i];
      row.reference += c.reference_f[i];
      raw_p += static_cast<double>(raw.probe_f[i]);
      raw_r += static_cast<double>(raw.reference_f[i]);
    }
    row.scattered = raw.n_bins ? ledger[d].back() : 0.0;
    if (row.reference > 0.0) {
      row.value = row.probe / row.reference;
      row.sigma = ratio_sigma(row.value, row.probe, row.reference, raw_p, raw_r);
    } else {
      row.value = row.sigma = std::numeric_limits<double>::quiet_NaN();
      row.flagged = true;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SpectrumRow> backscatter_spectrum(const CountRecord& raw, const CorrectedCounts& c,
                                              const DetectorConfig& det) {
  require(det.eta_b > 0.0, "backscatter_spectrum: backward efficiency must be positive");
  std::vector<SpectrumRow> rows;
  for (std::size_t d = 0; d < raw.detunings.size(); ++d) {
    SpectrumRow row;
    row.detuning = raw.detunings[d];
    double raw_b = 0.0, raw_r = 0.0;
    for (std::size_t b = 0; b < raw.n_bins; ++b) {
      const auto i = raw.index(d, b);
      row.probe += c.probe_b[i];
      row.reference += c.reference_f[i];
      raw_b += static_cast<double>(raw.probe_b[i]);
      raw_r += static_cast<double>(raw.reference_f[i]);
    }
    if (row.reference > 0.0) {
      const double incident = row.reference / (det.eta_f * det.eta_op);
      row.value = row.probe / (det.eta_b * incident);
      row.sigma = ratio_sigma(row.value, row.probe, row.reference, raw_b, raw_r);
      // A bin with no backward signal still carries counting noise.
      if (row.probe <= 0.0) row.sigma = std::sqrt(std::max(raw_b, 1.0)) / (det.eta_b * incident);
    } else {
      row.value = row.sigma = std::numeric_limits<double>::quiet_NaN();
      row.flagged = true;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<BinnedSpectrum> rebin_by_scattered(const CountRecord& raw, const DetectorConfig& det,
                                               double bin_width, double min_reference_counts) {
  require(bin_width > 0.0, "rebin_by_scattered: bin width must be positive");
  const CorrectedCounts c = background_correct(raw, det);
  const auto ledger = scattered_ledger(raw, c, det);

  struct Acc {
    double probe = 0, reference = 0, raw_probe = 0, raw_reference = 0, scattered = 0;
    std::size_t bins = 0;
  };
  // group → detuning → accumulator
  std::vector<std::vector<Acc>> groups;
  for (std::size_t d = 0; d < raw.detunings.size(); ++d) {
    double before = 0.0;
    for (std::size_t b = 0; b < raw.n_bins; ++b) {
      const double after = ledger[d][b];
      const double mid = 0.5 * (before + after);
      before = after;
      const auto g = static_cast<std::size_t>(std::floor(std::max(mid, 0.0) / bin_width));
      if (g >= groups.size()) groups.resize(g + 1, std::vector<Acc>(raw.detunings.size()));
      Acc& a = groups[g][d];
      const auto i = raw.index(d, b);
      a.probe += c.probe_f[i];
      a.reference += c.reference_f[i];
      a.raw_probe += static_cast<double>(raw.probe_f[i]);
      a.raw_reference += static_cast<double>(raw.reference_f[i]);
      a.scattered += mid;
      ++a.bins;
    }
  }

  std::vector<BinnedSpectrum> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    BinnedSpectrum spec;
    spec.group = g;
    spec.scattered_low = static_cast<double>(g) * bin_width;
    spec.scattered_high = static_cast<double>(g + 1) * bin_width;
    for (std::size_t d = 0; d < raw.detunings.size(); ++d) {
      const Acc& a = groups[g][d];
      if (a.bins == 0) continue;
      SpectrumRow row;
      row.detuning = raw.detunings[d];
      row.probe = a.probe;
      row.reference = a.reference;
      row.scattered = a.scattered / static_cast<double>(a.bins);
      if (a.reference >= min_reference_counts && a.reference > 0.0) {
        row.value = a.probe / a.reference;
        row.sigma = ratio_sigma(row.value, a.probe, a.reference, a.raw_probe, a.raw_reference);
      } else {
        row.value = row.sigma = std::numeric_limits<double>::quiet_NaN();
        row.flagged = true;
      }
      spec.rows.push_back(row);
    }
    if (!spec.rows.empty()) out.push_back(std::move(spec));
  }
  return out;
}

std::vector<SaturationRow> generate_saturation_run(double saturation_power, double efficiency,
                                                   double natural_linewidth,
                                                   std::span<const double> powers, double duration,
                                                   std::size_t repetitions, double background_b,
                                                   std::uint64_t seed) {
  require(duration > 0.0 && repetitions >= 1, "generate_saturation_run: invalid pulse");
  const double exposure = duration * static_cast<double>(repetitions);
  std::vector<SaturationRow> rows(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    std::mt19937_64 engine(rng::derive_seed(seed, k));
    const double rate =
        spectra::backscatter_rate({saturation_power, efficiency, powers[k]}, natural_linewidth);
    const double bg = background_b * exposure;
    SaturationRow& row = rows[k];
    row.incident_power = powers[k];
    row.counts = poisson(engine, rate * exposure + bg);
    row.rate = (static_cast<double>(row.counts) - bg) / exposure;
    row.sigma = std::sqrt(std::max(static_cast<double>(row.counts), 1.0)) / exposure;
  }
  return rows;
}

}  // namespace photon
}  // namespace lightatom
