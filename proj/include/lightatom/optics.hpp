#pragma once

#include <array>

#include "lightatom/constants.hpp"

namespace lightatom {

/// Position relative to the trap centre / probe focus, metres. z is the optical axis.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct AtomSpecies {
  double mass = 0.0;                   // kg
  double transition_wavelength = 0.0;  // m
  double natural_linewidth = 0.0;      // Γ0, rad/s
  double recoil_energy = 0.0;          // ħ²k²/2m, J

  /// Builds a species and derives the recoil energy from mass and wavelength.
  static AtomSpecies make(double mass, double wavelength, double linewidth);
  static AtomSpecies rb87();

  double wavenumber() const { return constants::two_pi / transition_wavelength; }
  double transition_frequency() const {
    return constants::two_pi * constants::speed_of_light / transition_wavelength;
  }
  void validate() const;
};

struct OpticalSystem {
  double focal_length = 5.95e-3;  // m
  double input_waist = 2.7e-3;    // m, w_L before the lens
  double numerical_aperture = 0.75;
  double wavelength = constants::rb87_d2_wavelength;  // probe wavelength, m
  double eta_f = 0.56;
  double eta_b = 0.59;
  double eta_op = 0.59;
  double collection_mode_overlap = 0.7;

  /// u = w_L / f
  double focusing_strength() const { return input_waist / focal_length; }
  void validate() const;
};

/// Paraxial focal spot of the probe: w_f = λ f / (π w_L), z_f = π w_f² / λ.
struct FocalGeometry {
  double waist = 0.0;
  double rayleigh_range = 0.0;
};
FocalGeometry focal_geometry(const OpticalSystem& system);

/// Far-off-resonant optical dipole trap. Lives here because the AC Stark
/// profile needs its geometry; the thermal module owns its physics.
struct TrapConfig {
  double depth = constants::boltzmann * 2.22e-3;  // U0, J
  std::array<double, 3> omega = {constants::khz_to_rad_s(107.0), constants::khz_to_rad_s(124.0),
                                 constants::khz_to_rad_s(13.8)};  // rad/s
  double waist = 1.4e-6;         // m
  double wavelength = 852e-9;    // m

  double rayleigh_range() const { return constants::pi * waist * waist / wavelength; }
  void validate() const;
};

struct FieldShifts {
  double bias_field = 0.0;     // T
  double zeeman = 0.0;         // ω_z, rad/s
  double ac_stark_peak = 0.0;  // ω_ac(0), rad/s

  /// δω(0) = ω_z + ω_ac(0)
  double center_shift() const { return zeeman + ac_stark_peak; }
};

namespace optics {

/// Mode overlap of a Gaussian beam focused by an ideal lens with the dipole
/// mode of a stationary atom, as a function of focusing strength u = w_L/f.
double mode_overlap_ideal(double u);

/// ε = 4Λ(1 − Λ)
double resonant_extinction(double overlap);

/// Λ(r) = Λ0 exp(−2(x²+y²)/w_f²) / (1 + (z/z_f)²)
double spatial_overlap(const Vec3& r, const OpticalSystem& system, double peak_overlap);
double spatial_overlap(const Vec3& r, const FocalGeometry& focus, double peak_overlap);

/// Paraxial Gaussian-beam light shift of the trap beam, scaled to ω_ac(0).
double ac_stark_shift(const Vec3& r, const TrapConfig& trap, double peak_shift);

/// ω_z = μ_B B (g'm' − g m) / ħ for a transition |F, m⟩ → |F', m'⟩.
double zeeman_shift(double field, double g_lower, int m_lower, double g_upper, int m_upper);

}  // namespace optics
}  // namespace lightatom
