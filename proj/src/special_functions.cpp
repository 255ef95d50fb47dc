#include "lightatom/special_functions.hpp"

#include <cmath>
#include <limits>

#include "lightatom/errors.hpp"

namespace lightatom::special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 100000;

// Modified Lentz evaluation of the Legendre continued fraction
//   e^x x^-a Γ(a,x) = 1/(x+1-a- 1(1-a)/(x+3-a- 2(2-a)/(x+5-a- ...)))
// Converges for any real a; fast when x > a + 1.
double continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  return h;
}

// Lower incomplete gamma times e^x x^-a: Σ x^n / (a(a+1)...(a+n)), a > 0.
double lower_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum;
}

// e^x E1(x)
double scaled_exponential_integral(double x) {
  if (x > 1.0) return continued_fraction(0.0, x);
  constexpr double euler_gamma = 0.57721566490153286061;
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    term *= -x / k;
    const double contribution = term / k;
    sum += contribution;
    if (std::fabs(contribution) < kEps * std::fabs(sum)) break;
  }
  return std::exp(x) * (-euler_gamma - std::log(x) - sum);
}

// ζ(s) for integer s >= 2 by Euler-Maclaurin summation from N = 10.
double zeta(int s) {
  constexpr int n_direct = 10;
  constexpr double bernoulli_over_factorial[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0,
                                                 -1.0 / 1209600.0, 1.0 / 47900160.0,
                                                 -691.0 / 1307674368000.0};
  double sum = 0.0;
  for (int n = 1; n < n_direct; ++n) sum += std::pow(n, -s);
  const double big_n = n_direct;
  sum += std::pow(big_n, 1 - s) / (s - 1) + 0.5 * std::pow(big_n, -s);
  double rising = s;  // s(s+1)...(s+2j-2)
  for (int j = 0; j < 6; ++j) {
    sum += bernoulli_over_factorial[j] * rising * std::pow(big_n, -s - 2 * j - 1);
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
  }
  return sum;
}

// (Γ(1+a) - 1)/a without the cancellation of forming Γ(1+a) first.
double gamma1p_minus_one_over_a(double a) {
  constexpr double euler_gamma = 0.57721566490153286061;
  // ln Γ(1+a) = -γa + Σ_{k>=2} ζ(k)(-a)^k / k
  double log_gamma = -euler_gamma * a;
  double power = -a;
  for (int k = 2; k < 200; ++k) {
    power *= -a;
    const double term = zeta(k) * power / k;
    log_gamma += term;
    if (std::fabs(term) < kEps * std::fabs(log_gamma)) break;
  }
  return std::expm1(log_gamma) / a;
}

// e^x Γ(a, x) for 0 < a < 0.2 and x <= a + 1, where Γ(a) - γ(a, x) would
// cancel. Uses Γ(a,x) = [Γ(1+a) - x^a]/a - Σ_{n>=1} (-1)^n x^(a+n) / (n!(a+n)).
double scaled_small_order(double a, double x) {
  const double log_x = std::log(x);
  const double head = gamma1p_minus_one_over_a(a) - std::expm1(a * log_x) / a;
  double term = 1.0;
  double tail = 0.0;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= -x / n;
    const double contribution = term / (a + n);
    tail += contribution;
    if (std::fabs(contribution) < kEps * std::fabs(tail)) break;
  }
  return std::exp(x) * (head - std::exp(a * log_x) * tail);
}

// e^x Γ(a, x) for a > 0.
double scaled_positive_order(double a, double x) {
  if (x > a + 1.0) return std::pow(x, a) * continued_fraction(a, x);
  if (a < 0.2) return scaled_small_order(a, x);
  const double lower = std::exp(a * std::log(x)) * lower_series(a, x);  // e^x γ(a,x)
  return std::exp(x) * std::tgamma(a) - lower;
}

}  // namespace

double upper_incomplete_gamma_scaled(double a, double x) {
  if (!std::isfinite(a) || !std::isfinite(x))
    throw DomainError("upper_incomplete_gamma: non-finite argument");
  if (x <= 0.0) throw DomainError("upper_incomplete_gamma: x must be positive");

  if (a > 0.0) return scaled_positive_order(a, x);

  // Step up to the first order >= 0, then recur downward.
  const int steps = static_cast<int>(std::ceil(-a));
  double order = a + steps;
  double value;
  if (order > 0.0) {
    value = scaled_positive_order(order, x);
  } else {
    order = 0.0;
    value = scaled_exponential_integral(x);
  }
  for (int i = 0; i < steps; ++i) {
    order -= 1.0;
    value = (value - std::pow(x, order)) / order;
  }
  return value;
}

double upper_incomplete_gamma(double a, double x) {
  return std::exp(-x) * upper_incomplete_gamma_scaled(a, x);
}

}  // namespace lightatom::special
