#include "lightatom/spectra.hpp"

#include <cmath>

#include "lightatom/errors.hpp"

namespace lightatom {

using detail::require;

void LineshapeParams::validate() const {
  require(linewidth > 0.0, "LineshapeParams: linewidth must be positive");
  require(overlap >= 0.0 && overlap <= 1.0, "LineshapeParams: overlap must lie in [0, 1]");
  require(phase > -constants::pi - 1e-12 && phase <= constants::pi + 1e-12,
          "LineshapeParams: phase must lie in (-pi, pi]");
}

namespace spectra {

double transmission_at_detuning(const LineshapeParams& p, double detuning) {
  require(p.linewidth > 0.0, "transmission: linewidth must be positive");
  const double d = detuning - p.shift;
  const double half = 0.5 * p.linewidth;
  const double lorentz = 1.0 / (d * d + half * half);
  const double a = p.amplitude;
  return 1.0 + a * a * lorentz +
         2.0 * a * lorentz * (d * std::sin(p.phase) - half * std::cos(p.phase));
}

double transmission(const LineshapeParams& p, double probe_frequency, double transition_frequency) {
  return transmission_at_detuning(p, probe_frequency - transition_frequency);
}

double resonant_dip(const LineshapeParams& p) {
  return 1.0 - transmission_at_detuning(p, p.shift);
}

double reflection(double peak_probability, double linewidth, double shift, double probe_frequency,
                  double transition_frequency) {
  require(linewidth > 0.0, "reflection: linewidth must be positive");
  require(peak_probability >= 0.0 && peak_probability <= 1.0,
          "reflection: peak probability must lie in [0, 1]");
  const double d = probe_frequency - transition_frequency - shift;
  return peak_probability / (4.0 * d * d / (linewidth * linewidth) + 1.0);
}

double ideal_saturation_power(const AtomSpecies& species) {
  species.validate();
  return constants::hbar * species.transition_frequency() * species.natural_linewidth / 8.0;
}

OverlapEstimate overlap_from_saturation(double saturation_power, const AtomSpecies& species) {
  require(saturation_power > 0.0, "overlap_from_saturation: saturation power must be positive");
  OverlapEstimate e;
  e.overlap = ideal_saturation_power(species) / saturation_power;
  e.model_consistent = e.overlap <= 1.0;
  return e;
}

double backscatter_rate(const SaturationParams& sat, double natural_linewidth) {
  require(sat.saturation_power > 0.0, "backscatter_rate: saturation power must be positive");
  require(sat.incident_power >= 0.0, "backscatter_rate: incident power must be non-negative");
  return 0.5 * sat.efficiency * natural_linewidth * sat.incident_power /
         (sat.incident_power + sat.saturation_power);
}

}  // namespace spectra
}  // namespace lightatom
