#include "lightatom/thermal_kernels.hpp"

#include <algorithm>

#include "lightatom/thermal.hpp"

namespace lightatom::thermal::kernels {
namespace {

Vec3 position(const KernelInputs& in, std::size_t i) {
  const Vec3 u = unit_normal_position(in.seed, i);
  return {u.x * in.sigma[0], u.y * in.sigma[1], u.z * in.sigma[2]};
}

}  // namespace

void evaluate_sample(const KernelInputs& in, const Vec3& r, std::span<double> tau_out) {
  const double overlap = optics::spatial_overlap(r, in.focus, in.base.overlap);
  // A/(ΓΛ) is held at its value for the trap centre.
  const double amplitude =
      in.base.overlap > 0.0 ? in.base.amplitude * overlap / in.base.overlap : 0.0;
  const LineshapeParams local{in.base.linewidth,
                              in.zeeman + optics::ac_stark_shift(r, in.trap, in.ac_stark_peak),
                              overlap, in.base.phase, amplitude};
  for (std::size_t k = 0; k < in.detunings.size(); ++k)
    tau_out[k] = spectra::transmission_at_detuning(local, in.detunings[k]);
}

Moments accumulate_serial(const KernelInputs& in) {
  const std::size_t nd = in.detunings.size();
  Moments m{std::vector<double>(nd, 0.0), std::vector<double>(nd, 0.0)};
  std::vector<double> tau(nd);
  for (std::size_t i = 0; i < in.n_samples; ++i) {
    evaluate_sample(in, position(in, i), tau);
    for (std::size_t k = 0; k < nd; ++k) {
      const double d = tau[k] - 1.0;
      m.sum[k] += d;
      m.sum_sq[k] += d * d;
    }
  }
  return m;
}

Moments accumulate_openmp(const KernelInputs& in) {
  const std::size_t nd = in.detunings.size();
  const std::size_t n_chunks = (in.n_samples + kChunk - 1) / kChunk;
  std::vector<double> partial_sum(n_chunks * nd, 0.0);
  std::vector<double> partial_sq(n_chunks * nd, 0.0);

#pragma omp parallel
  {
    std::vector<double> tau(nd);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
      const std::size_t end = std::min(begin + kChunk, in.n_samples);
      double* s = partial_sum.data() + static_cast<std::size_t>(c) * nd;
      double* q = partial_sq.data() + static_cast<std::size_t>(c) * nd;
      for (std::size_t i = begin; i < end; ++i) {
        evaluate_sample(in, position(in, i), tau);
        for (std::size_t k = 0; k < nd; ++k) {
          const double d = tau[k] - 1.0;
          s[k] += d;
          q[k] += d * d;
        }
      }
    }
  }

  Moments m{std::vector<double>(nd, 0.0), std::vector<double>(nd, 0.0)};
  for (std::size_t c = 0; c < n_chunks; ++c)
    for (std::size_t k = 0; k < nd; ++k) {
      m.sum[k] += partial_sum[c * nd + k];
      m.sum_sq[k] += partial_sq[c * nd + k];
    }
  return m;
}

}  // namespace lightatom::thermal::kernels
