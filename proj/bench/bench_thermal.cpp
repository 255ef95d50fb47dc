// Serial reference vs OpenMP thermal average on the heating.json geometry.
// Args: {samples, worker threads}. The serial case ignores the thread count.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "lightatom/config.hpp"
#include "lightatom/thermal.hpp"

using namespace lightatom;

namespace {

const RunConfig& config() {
  static const RunConfig c = load_config(LIGHTATOM_SOURCE_DIR "/configs/heating.json");
  return c;
}

void run(benchmark::State& state, Backend backend) {
  const RunConfig& c = config();
  const auto model = c.thermal_model();
  const auto n = static_cast<std::size_t>(state.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto s = thermal::thermal_average_transmission(c.thermal, model, c.sweep.detunings, n, c.seed, backend);
    benchmark::DoNotOptimize(s.mean_transmission.data());
  }
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * c.sweep.detunings.size()));
}

void BM_serial(benchmark::State& state) { run(state, Backend::serial); }
void BM_openmp(benchmark::State& state) { run(state, Backend::openmp); }

}  // namespace

BENCHMARK(BM_serial)->Args({20000, 1})->Args({100000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_openmp)
    ->ArgsProduct({{20000, 100000}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
