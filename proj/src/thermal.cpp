#include "lightatom/thermal.hpp"

#include <algorithm>
#include <cmath>

#include "lightatom/counter_rng.hpp"
#include "lightatom/errors.hpp"
#include "lightatom/lineshape_fit.hpp"
#include "lightatom/thermal_kernels.hpp"

namespace lightatom {

using detail::require;

void ThermalState::validate() const {
  for (double t : temperature)
    require(std::isfinite(t) && t >= 0.0, "ThermalState: temperatures must be non-negative");
}

namespace thermal {

double positional_sigma(double temperature, double trap_frequency, double mass) {
  require(temperature >= 0.0, "positional_sigma: temperature must be non-negative");
  require(trap_frequency > 0.0, "positional_sigma: trap frequency must be positive");
  require(mass > 0.0, "positional_sigma: mass must be positive");
  return std::sqrt(constants::boltzmann * temperature / (mass * trap_frequency * trap_frequency));
}

std::array<double, 3> positional_sigmas(const ThermalState& state, const TrapConfig& trap,
                                        double mass) {
  return {positional_sigma(state.temperature[0], trap.omega[0], mass),
          positional_sigma(state.temperature[1], trap.omega[1], mass),
          positional_sigma(state.temperature[2], trap.omega[2], mass)};
}

Vec3 unit_normal_position(std::uint64_t seed, std::uint64_t index) {
  const auto a = rng::normal_pair(seed, index, 0);
  const auto b = rng::normal_pair(seed, index, 1);
  return {a.first, a.second, b.first};
}

std::vector<Vec3> sample_positions(const ThermalState& state, const TrapConfig& trap,
                                   const AtomSpecies& species, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample_positions: need at least one sample");
  state.validate();
  const auto sigma = positional_sigmas(state, trap, species.mass);
  std::vector<Vec3> out(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const Vec3 u = unit_normal_position(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = {u.x * sigma[0], u.y * sigma[1], u.z * sigma[2]};
  }
  return out;
}

ThermalState recoil_heat(const ThermalState& state, std::uint64_t n_photons,
                         const AtomSpecies& species) {
  state.validate();
  ThermalState out = state;
  const double n = static_cast<double>(n_photons);
  const double radial = n * species.recoil_energy / 3.0 / constants::boltzmann;
  const double axial = n * 4.0 * species.recoil_energy / 3.0 / constants::boltzmann;
  out.temperature[0] += radial;
  out.temperature[1] += radial;
  out.temperature[2] += axial;
  out.photons_scattered += n_photons;
  return out;
}

double effective_overlap(double overlap, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "effective_overlap: alpha must lie in [0, 1]");
  require(overlap >= 0.0 && overlap <= 1.0, "effective_overlap: overlap must lie in [0, 1]");
  return (1.0 - alpha) * overlap;
}

SampledSpectrum thermal_average_transmission(const ThermalState& state, const ThermalModel& model,
                                             std::span<const double> detunings,
                                             std::size_t n_samples, std::uint64_t seed,
                                             Backend backend) {
  require(n_samples >= 1, "thermal_average_transmission: need at least one sample");
  state.validate();
  model.trap.validate();
  model.base.validate();

  kernels::KernelInputs in;
  in.sigma = positional_sigmas(state, model.trap, model.species.mass);
  in.focus = focal_geometry(model.system);
  in.trap = model.trap;
  in.zeeman = model.shifts.zeeman;
  in.ac_stark_peak = model.shifts.ac_stark_peak;
  in.base = model.base;
  in.detunings = detunings;
  in.n_samples = n_samples;
  in.seed = seed;

  SampledSpectrum out;
  out.detunings.assign(detunings.begin(), detunings.end());
  out.n_samples = n_samples;
  out.seed = seed;
  const std::size_t nd = detunings.size();

  // A cold atom sits at the origin: the average is a single evaluation.
  if (in.sigma == std::array<double, 3>{0.0, 0.0, 0.0}) {
    out.mean_transmission.resize(nd);
    kernels::evaluate_sample(in, Vec3{}, out.mean_transmission);
    out.standard_error.assign(nd, 0.0);
    return out;
  }

  const kernels::Moments m = backend == Backend::serial ? kernels::accumulate_serial(in)
                                                        : kernels::accumulate_openmp(in);
  const double n = static_cast<double>(n_samples);
  out.mean_transmission.resize(nd);
  out.standard_error.resize(nd);
  for (std::size_t k = 0; k < nd; ++k) {
    const double mean_dev = m.sum[k] / n;
    out.mean_transmission[k] = 1.0 + mean_dev;
    const double var = n > 1.0 ? std::max(0.0, (m.sum_sq[k] - n * mean_dev * mean_dev) / (n - 1.0)) : 0.0;
    out.standard_error[k] = std::sqrt(var / n);
  }
  return out;
}

std::vector<SweepPoint> heating_sweep(const ThermalState& initial, const ThermalModel& model,
                                      std::span<const std::uint64_t> photon_schedule,
                                      std::span<const double> detunings, std::size_t n_samples,
                                      std::uint64_t seed, Backend backend) {
  require(std::is_sorted(photon_schedule.begin(), photon_schedule.end()),
          "heating_sweep: photon schedule must be nondecreasing");
  require(detunings.size() > 4, "heating_sweep: need more than four detunings to fit");

  std::vector<SweepPoint> out;
  ThermalState state = initial;
  std::uint64_t applied = 0;
  for (std::uint64_t photons : photon_schedule) {
    state = recoil_heat(state, photons - applied, model.species);
    applied = photons;

    SweepPoint point;
    point.photons = photons;
    point.state = state;
    // Same seed at every point: common random numbers keep the sweep smooth.
    const SampledSpectrum spectrum =
        thermal_average_transmission(state, model, detunings, n_samples, seed, backend);
    std::vector<fit::DataRow> rows;
    rows.reserve(detunings.size());
    for (std::size_t k = 0; k < detunings.size(); ++k)
      rows.push_back({spectrum.detunings[k], spectrum.mean_transmission[k], 1e-3});
    try {
      const fit::FitResult r =
          fit::fit(fit::transmission_problem(std::move(rows), model.species.natural_linewidth));
      point.linewidth = r.parameters[0];
      point.shift = r.parameters[1];
      point.overlap = r.parameters[2];
      point.phase = r.parameters[3];
      point.extinction = fit::fitted_extinction(r);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace thermal
}  // namespace lightatom
