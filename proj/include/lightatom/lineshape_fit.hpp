#pragma once

#include <vector>

#include "lightatom/fitting.hpp"
#include "lightatom/spectra.hpp"

namespace lightatom::fit {

// Lineshape models in SI units. x is the probe detuning ω_p − ω_0 in rad/s for
// transmission and reflection, the incident power in W for saturation.

/// θ = (Γ, δω, Λ, φ), A = ΓΛ.
Model transmission_model();
/// θ = (Γ, δω, P_b0)
Model reflection_model();
/// θ = (P_sat, η); y is the detected rate in photons/s.
Model saturation_model(double natural_linewidth);

/// Problems carrying the data-driven starting point and bounds:
/// Γ from the natural linewidth, δω from the grid extremum, Λ from the
/// observed dip inverted on the Λ <= 1/2 branch, φ = 0.
FitProblem transmission_problem(std::vector<DataRow> rows, double natural_linewidth);
FitProblem reflection_problem(std::vector<DataRow> rows, double natural_linewidth);
FitProblem saturation_problem(std::vector<DataRow> rows, double natural_linewidth);

LineshapeParams to_lineshape(const FitResult& transmission_fit);

/// 1 − τ at the fitted resonance.
double fitted_extinction(const FitResult& transmission_fit);

}  // namespace lightatom::fit
