#pragma once

#include "lightatom/optics.hpp"

namespace lightatom {

/// Parameters of the stationary-atom transmission lineshape. All frequencies
/// in rad/s. `amplitude` is the interference coefficient A, equal to ΓΛ when
/// the probe and collection modes are matched.
struct LineshapeParams {
  double linewidth = 0.0;  // Γ
  double shift = 0.0;      // δω, from the bare transition ω_0
  double overlap = 0.0;    // Λ
  double phase = 0.0;      // φ
  double amplitude = 0.0;  // A

  /// Four-parameter form used by the fits: A = ΓΛ.
  static LineshapeParams matched(double linewidth, double shift, double overlap, double phase = 0.0) {
    return {linewidth, shift, overlap, phase, linewidth * overlap};
  }
  void validate() const;
};

struct SaturationParams {
  double saturation_power = 0.0;  // W
  double efficiency = 0.0;        // η, total detection efficiency
  double incident_power = 0.0;    // W
};

struct OverlapEstimate {
  double overlap = 0.0;
  /// false when the estimate exceeds 1, which no physical overlap can.
  bool model_consistent = true;
};

namespace spectra {

/// τ(ω_p) with Lorentzian and dispersive terms.
double transmission(const LineshapeParams& p, double probe_frequency, double transition_frequency);

/// Same, with the probe given as detuning Δ = ω_p − ω_0.
double transmission_at_detuning(const LineshapeParams& p, double detuning);

/// 1 − τ on the shifted resonance.
double resonant_dip(const LineshapeParams& p);

/// Backscattering probability P_b0 / [4(ω_p − ω_0 − δω)²/Γ² + 1].
double reflection(double peak_probability, double linewidth, double shift, double probe_frequency,
                  double transition_frequency);

/// P_sat at perfect overlap, ħω_0Γ_0/8.
double ideal_saturation_power(const AtomSpecies& species);

/// Λ = P_sat,Λ=1 / P_sat
OverlapEstimate overlap_from_saturation(double saturation_power, const AtomSpecies& species);

/// R_b = (ηΓ_0/2) P_inc / (P_inc + P_sat), photons/s at the detector.
double backscatter_rate(const SaturationParams& sat, double natural_linewidth);

}  // namespace spectra
}  // namespace lightatom
