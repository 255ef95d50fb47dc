#pragma once

#include <numbers>

namespace lightatom::constants {

// CODATA 2018 recommended values, SI units.
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double speed_of_light = 299792458.0;              // m/s
inline constexpr double planck = 6.62607015e-34;                   // J s
inline constexpr double hbar = 1.054571817e-34;                    // J s
inline constexpr double boltzmann = 1.380649e-23;                  // J/K
inline constexpr double bohr_magneton = 9.2740100783e-24;          // J/T
inline constexpr double atomic_mass_unit = 1.66053906660e-27;      // kg

// 87Rb D2 line
inline constexpr double rb87_mass = 86.909180531 * atomic_mass_unit;  // kg
inline constexpr double rb87_d2_wavelength = 780.241209686e-9;        // m
inline constexpr double rb87_d2_linewidth = two_pi * 6.07e6;          // rad/s

// unit helpers used at the I/O boundary
inline constexpr double mhz_to_rad_s(double mhz) { return two_pi * 1e6 * mhz; }
inline constexpr double rad_s_to_mhz(double w) { return w / (two_pi * 1e6); }
inline constexpr double khz_to_rad_s(double khz) { return two_pi * 1e3 * khz; }

}  // namespace lightatom::constants
