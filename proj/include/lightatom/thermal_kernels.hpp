#pragma once

// Inner Monte-Carlo loops behind thermal::thermal_average_transmission.
// Exposed for the benchmark and for the serial-vs-parallel tests.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lightatom/optics.hpp"
#include "lightatom/spectra.hpp"

namespace lightatom::thermal::kernels {

struct KernelInputs {
  std::array<double, 3> sigma{};
  FocalGeometry focus;
  TrapConfig trap;
  double zeeman = 0.0;
  double ac_stark_peak = 0.0;
  LineshapeParams base;
  std::span<const double> detunings;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Σ(τ − 1) and Σ(τ − 1)² per detuning.
struct Moments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

/// Samples processed together before a partial sum is stored. Fixed, so the
/// parallel reduction order does not depend on the thread count.
inline constexpr std::size_t kChunk = 2048;

/// Transmission at every detuning for one atom position.
void evaluate_sample(const KernelInputs& in, const Vec3& r, std::span<double> tau_out);

Moments accumulate_serial(const KernelInputs& in);
Moments accumulate_openmp(const KernelInputs& in);

}  // namespace lightatom::thermal::kernels
