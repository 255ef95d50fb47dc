#pragma once

namespace lightatom::special {

/// Upper incomplete gamma function Γ(a, x) = ∫_x^∞ t^(a-1) e^(-t) dt.
///
/// Defined for any finite real a (including zero and negative orders) and
/// x > 0. Non-positive orders are reached by downward recurrence
///   Γ(a, x) = [Γ(a+1, x) - x^a e^(-x)] / a
/// from the first order above zero (or from the exponential integral E1 when
/// a is a non-positive integer). Throws DomainError for x <= 0 or non-finite
/// input.
double upper_incomplete_gamma(double a, double x);

/// e^x Γ(a, x). Stays finite where Γ(a, x) itself underflows (large x).
double upper_incomplete_gamma_scaled(double a, double x);

}  // namespace lightatom::special
