#include "lightatom/optics.hpp"

#include <cmath>

#include "lightatom/errors.hpp"
#include "lightatom/special_functions.hpp"

namespace lightatom {

using detail::require;

AtomSpecies AtomSpecies::make(double mass, double wavelength, double linewidth) {
  AtomSpecies s;
  s.mass = mass;
  s.transition_wavelength = wavelength;
  s.natural_linewidth = linewidth;
  s.validate();
  const double k = s.wavenumber();
  s.recoil_energy = constants::hbar * constants::hbar * k * k / (2.0 * mass);
  return s;
}

AtomSpecies AtomSpecies::rb87() {
  return make(constants::rb87_mass, constants::rb87_d2_wavelength, constants::rb87_d2_linewidth);
}

void AtomSpecies::validate() const {
  require(mass > 0.0, "AtomSpecies: mass must be positive");
  require(transition_wavelength > 0.0, "AtomSpecies: wavelength must be positive");
  require(natural_linewidth > 0.0, "AtomSpecies: natural linewidth must be positive");
}

void OpticalSystem::validate() const {
  require(focal_length > 0.0, "OpticalSystem: focal length must be positive");
  require(input_waist > 0.0, "OpticalSystem: input waist must be positive");
  require(wavelength > 0.0, "OpticalSystem: wavelength must be positive");
  require(numerical_aperture > 0.0 && numerical_aperture < 1.0,
          "OpticalSystem: numerical aperture must lie in (0, 1)");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(unit(eta_f) && unit(eta_b) && unit(eta_op) && unit(collection_mode_overlap),
          "OpticalSystem: efficiencies must lie in [0, 1]");
}

void TrapConfig::validate() const {
  require(depth > 0.0, "TrapConfig: depth must be positive");
  require(waist > 0.0, "TrapConfig: waist must be positive");
  require(wavelength > 0.0, "TrapConfig: wavelength must be positive");
  for (double w : omega) require(w > 0.0, "TrapConfig: trap frequencies must be positive");
}

FocalGeometry focal_geometry(const OpticalSystem& system) {
  require(system.input_waist > 0.0 && system.focal_length > 0.0 && system.wavelength > 0.0,
          "focal_geometry: invalid optical system");
  FocalGeometry g;
  g.waist = system.wavelength * system.focal_length / (constants::pi * system.input_waist);
  g.rayleigh_range = constants::pi * g.waist * g.waist / system.wavelength;
  return g;
}

namespace optics {

double mode_overlap_ideal(double u) {
  require(std::isfinite(u) && u > 0.0, "mode_overlap_ideal: focusing strength must be positive");
  // e^(2/u²)[Γ(-1/4,b) + uΓ(1/4,b)]² with b = 1/u², written with scaled
  // gamma functions so the exponential never overflows for weak focusing.
  const double b = 1.0 / (u * u);
  const double bracket = special::upper_incomplete_gamma_scaled(-0.25, b) +
                         u * special::upper_incomplete_gamma_scaled(0.25, b);
  return 3.0 / (16.0 * u * u * u) * bracket * bracket;
}

double resonant_extinction(double overlap) {
  require(overlap >= 0.0 && overlap <= 1.0, "resonant_extinction: overlap must lie in [0, 1]");
  return 4.0 * overlap * (1.0 - overlap);
}

double spatial_overlap(const Vec3& r, const FocalGeometry& focus, double peak_overlap) {
  require(peak_overlap >= 0.0 && peak_overlap <= 1.0,
          "spatial_overlap: peak overlap must lie in [0, 1]");
  const double rho2 = r.x * r.x + r.y * r.y;
  const double zeta = r.z / focus.rayleigh_range;
  return peak_overlap * std::exp(-2.0 * rho2 / (focus.waist * focus.waist)) / (1.0 + zeta * zeta);
}

double spatial_overlap(const Vec3& r, const OpticalSystem& system, double peak_overlap) {
  return spatial_overlap(r, focal_geometry(system), peak_overlap);
}

double ac_stark_shift(const Vec3& r, const TrapConfig& trap, double peak_shift) {
  require(trap.waist > 0.0, "ac_stark_shift: trap waist must be positive");
  const double zeta = r.z / trap.rayleigh_range();
  const double spread = 1.0 + zeta * zeta;  // w(z)²/w²
  const double w2 = trap.waist * trap.waist * spread;
  return peak_shift * std::exp(-2.0 * (r.x * r.x + r.y * r.y) / w2) / spread;
}

double zeeman_shift(double field, double g_lower, int m_lower, double g_upper, int m_upper) {
  return constants::bohr_magneton * field * (g_upper * m_upper - g_lower * m_lower) /
         constants::hbar;
}

}  // namespace optics
}  // namespace lightatom
