#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lightatom/constants.hpp"
#include "lightatom/errors.hpp"
#include "lightatom/optics.hpp"
#include "lightatom/spectra.hpp"
#include "oracles.hpp"

using namespace lightatom;
using constants::mhz_to_rad_s;

namespace {

const double kGamma0 = constants::rb87_d2_linewidth;

LineshapeParams reference() {
  return LineshapeParams::matched(mhz_to_rad_s(6.9), mhz_to_rad_s(48.03), 0.0467, 0.13);
}

}  // namespace

TEST_CASE("on-resonance transmission of the matched lineshape") {
  const auto p = LineshapeParams::matched(kGamma0, mhz_to_rad_s(48.0), 0.0467);
  const double w0 = constants::rb87_d2_wavelength;  // arbitrary reference, only differences matter
  const double tau = spectra::transmission(p, w0 + p.shift, w0);
  CHECK(tau == doctest::Approx(0.8220).epsilon(1e-4));
  CHECK(tau == doctest::Approx((1 - 2 * 0.0467) * (1 - 2 * 0.0467)).epsilon(1e-12));
  CHECK(std::fabs(spectra::transmission_at_detuning(p, p.shift + 100 * p.linewidth) - 1.0) < 1e-3);
  CHECK(std::fabs(spectra::transmission_at_detuning(p, p.shift - 100 * p.linewidth) - 1.0) < 1e-3);
}

TEST_CASE("fitted lineshape against an independent complex-amplitude evaluation") {
  const auto p = reference();
  for (int i = 0; i < 21; ++i) {
    const double detuning = mhz_to_rad_s(33.0 + 1.5 * i);
    const double want = oracle::transmission(p.linewidth, p.amplitude, p.phase, detuning - p.shift);
    CHECK(spectra::transmission_at_detuning(p, detuning) == doctest::Approx(want).epsilon(1e-13));
  }
  // General (A, φ) parameterisation too
  const LineshapeParams general{mhz_to_rad_s(6.1), mhz_to_rad_s(-3.0), 0.1, -2.0, mhz_to_rad_s(0.4)};
  for (double d : {-20.0, -3.0, 0.0, 5.5, 30.0})
    CHECK(spectra::transmission_at_detuning(general, mhz_to_rad_s(d)) ==
          doctest::Approx(oracle::transmission(general.linewidth, general.amplitude, general.phase,
                                               mhz_to_rad_s(d) - general.shift))
              .epsilon(1e-13));
}

TEST_CASE("extinction identity for random overlaps") {
  std::mt19937_64 engine(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double l = dist(engine);
    const auto p = LineshapeParams::matched(kGamma0, mhz_to_rad_s(10.0), l);
    CHECK(std::fabs(spectra::resonant_dip(p) - optics::resonant_extinction(l)) <= 1e-12);
  }
}

TEST_CASE("symmetry about the shifted resonance at zero phase") {
  const auto p = LineshapeParams::matched(kGamma0, mhz_to_rad_s(47.32), 0.2);
  for (double d : {0.1, 1.0, 3.0, 12.0, 80.0}) {
    const double off = mhz_to_rad_s(d);
    CHECK(spectra::transmission_at_detuning(p, p.shift + off) ==
          doctest::Approx(spectra::transmission_at_detuning(p, p.shift - off)).epsilon(1e-14));
  }
}

TEST_CASE("transmission is non-negative over the physical parameter range") {
  for (int il = 0; il <= 20; ++il) {
    for (int ip = -9; ip <= 10; ++ip) {
      const double l = il / 20.0;
      const double phase = constants::pi * ip / 10.0;
      const auto p = LineshapeParams::matched(kGamma0, 0.0, l, phase);
      for (int k = -500; k <= 500; ++k) {
        const double tau = spectra::transmission_at_detuning(p, 0.1 * k * kGamma0);
        REQUIRE(tau >= -1e-15);
      }
    }
  }
}

TEST_CASE("transmission rejects a non-positive linewidth") {
  auto p = reference();
  p.linewidth = 0.0;
  CHECK_THROWS_AS(spectra::transmission_at_detuning(p, 0.0), DomainError);
  p.linewidth = -1.0;
  CHECK_THROWS_AS(spectra::transmission(p, 1.0, 0.0), DomainError);
}

TEST_CASE("reflection lineshape") {
  const double pb0 = 0.0061, g = kGamma0, shift = mhz_to_rad_s(48.0);
  CHECK(spectra::reflection(pb0, g, shift, shift, 0.0) == pb0);
  CHECK(spectra::reflection(pb0, g, shift, shift + g / 2, 0.0) == doctest::Approx(pb0 / 2).epsilon(1e-15));
  CHECK(spectra::reflection(pb0, g, shift, shift + 1e6 * g, 0.0) < 1e-14);
}

TEST_CASE("reflection integrates to the Lorentzian area") {
  const double pb0 = 0.0061, g = kGamma0, shift = mhz_to_rad_s(48.0);
  // Δ = Γ s/(1 − s²) maps (−1, 1) onto the real line.
  auto integrand = [&](double s) {
    const double q = 1.0 - s * s;
    if (q <= 0.0) return pb0 * g / 2.0;  // limit of the transformed integrand at s = ±1
    const double delta = g * s / q;
    return spectra::reflection(pb0, g, shift, shift + delta, 0.0) * g * (1.0 + s * s) / (q * q);
  };
  const double area = oracle::integrate(integrand, -1.0, 1.0, 1e-12 * pb0 * g);
  CHECK(area == doctest::Approx(constants::pi * g * pb0 / 2.0).epsilon(1e-6));
}

TEST_CASE("ideal saturation power") {
  const auto rb = AtomSpecies::rb87();
  const double p = spectra::ideal_saturation_power(rb);
  CHECK(std::fabs(p / 1.21e-12 - 1.0) < 0.01);
  CHECK(p == doctest::Approx(1.21374211e-12).epsilon(1e-6));
  const double by_hand = constants::hbar * constants::two_pi * constants::speed_of_light /
                         constants::rb87_d2_wavelength * kGamma0 / 8.0;
  CHECK(p == doctest::Approx(by_hand).epsilon(1e-14));
  const auto wide = AtomSpecies::make(rb.mass, rb.transition_wavelength, 2.0 * rb.natural_linewidth);
  CHECK(spectra::ideal_saturation_power(wide) == doctest::Approx(2.0 * p).epsilon(1e-14));
}

TEST_CASE("overlap from a measured saturation power") {
  const auto rb = AtomSpecies::rb87();
  const double p1 = spectra::ideal_saturation_power(rb);
  const auto e = spectra::overlap_from_saturation(26e-12, rb);
  CHECK(e.overlap == doctest::Approx(0.046682389).epsilon(1e-7));
  CHECK(e.overlap >= 0.043);
  CHECK(e.overlap <= 0.051);
  CHECK(e.model_consistent);
  CHECK(spectra::overlap_from_saturation(p1, rb).overlap == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spectra::overlap_from_saturation(2 * p1, rb).overlap == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_FALSE(spectra::overlap_from_saturation(0.5 * p1, rb).model_consistent);
  CHECK_THROWS_AS(spectra::overlap_from_saturation(0.0, rb), DomainError);
}

TEST_CASE("backscatter rate saturates at half the scattering rate") {
  const double eta = 0.0195, psat = 26e-12;
  CHECK(spectra::backscatter_rate({psat, eta, psat}, kGamma0) == doctest::Approx(185927.3072).epsilon(1e-9));
  CHECK(spectra::backscatter_rate({psat, eta, psat}, kGamma0) == doctest::Approx(eta * kGamma0 / 4).epsilon(1e-15));
  CHECK(spectra::backscatter_rate({psat, eta, 1e3}, kGamma0) == doctest::Approx(eta * kGamma0 / 2).epsilon(1e-12));
  double previous = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double r = spectra::backscatter_rate({psat, eta, 1e-12 * i}, kGamma0);
    CHECK(r > previous);
    previous = r;
  }
}
