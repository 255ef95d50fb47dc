// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "lightatom/artifacts.hpp"
#include "lightatom/commands.hpp"
#include "lightatom/config.hpp"
#include "lightatom/constants.hpp"
#include "lightatom/lineshape_fit.hpp"
#include "lightatom/optics.hpp"
#include "lightatom/photon_sim.hpp"
#include "lightatom/spectra.hpp"
#include "lightatom/thermal.hpp"

using namespace lightatom;
using constants::mhz_to_rad_s;
using constants::rad_s_to_mhz;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(LIGHTATOM_SOURCE_DIR) / "configs";

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
  }
  void note(const std::string& what) { details.push_back("info " + what); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunConfig load(const std::string& name, nlohmann::json overrides = nlohmann::json::object()) {
  auto doc = nlohmann::json::parse(io::read_text(kConfigs / name));
  doc.merge_patch(overrides);
  return resolve_config(doc);
}

Outcome mode_overlap() {
  Outcome o;
  const double lambda = optics::mode_overlap_ideal(0.45378);
  o.check(std::fabs(lambda - 0.112) <= 0.0005, fmt::format("Λ(0.45378) = {:.6f}, target 0.112 ± 0.0005", lambda));
  const int calls = 10000;
  double sink = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < calls; ++i) sink += optics::mode_overlap_ideal(0.45378 + 1e-9 * i);
  const double per_call = seconds_since(t0) / calls;
  o.check(per_call < 1e-3 && sink > 0.0, fmt::format("runtime {:.2f} µs per evaluation, limit 1 ms", per_call * 1e6));
  return o;
}

Outcome extinction() {
  Outcome o;
  std::mt19937_64 engine(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double l = u(engine);
    const auto p = LineshapeParams::matched(constants::rb87_d2_linewidth, mhz_to_rad_s(48.0), l, 0.0);
    const double tau = spectra::transmission_at_detuning(p, p.shift);
    worst = std::max(worst, std::fabs(1.0 - tau - 4.0 * l * (1.0 - l)));
  }
  o.check(worst <= 1e-12, fmt::format("max |1 − τ(res) − 4Λ(1−Λ)| over 1000 random Λ = {:.2e}, limit 1e-12", worst));

  const double matched = optics::resonant_extinction(0.0467);
  o.check(std::fabs(100.0 * matched - 17.7) <= 0.1,
          fmt::format("ε = 4Λ(1−Λ) at Λ = 0.0467 is {:.3f}%, target 17.7 ± 0.1", 100.0 * matched));
  const double d_eps = 4.0 * (1.0 - 2.0 * 0.0467) * 0.0002;
  o.note(fmt::format("Λ = 4.67(2)% propagates to ±{:.3f} pp on ε", 100.0 * d_eps));
  const auto fitted = LineshapeParams::matched(mhz_to_rad_s(6.9), mhz_to_rad_s(48.03), 0.0467, 0.13);
  o.note(fmt::format("dip of the fitted lineshape with φ = 0.13 is {:.3f}%", 100.0 * spectra::resonant_dip(fitted)));
  return o;
}

Outcome saturation() {
  Outcome o;
  const auto rb = AtomSpecies::rb87();
  const double p = spectra::ideal_saturation_power(rb);
  o.check(std::fabs(p / 1.21e-12 - 1.0) <= 0.01, fmt::format("P_sat,Λ=1 = {:.5f} pW, target 1.21 pW ± 1%", p * 1e12));
  const double l = spectra::overlap_from_saturation(26e-12, rb).overlap;
  o.check(l >= 0.043 && l <= 0.051, fmt::format("Λ from 26 pW = {:.3f}%, window [4.3, 5.1]%", 100.0 * l));
  return o;
}

Outcome recoil() {
  Outcome o;
  const auto rb = AtomSpecies::rb87();
  const ThermalState start{{21e-6, 21e-6, 21e-6}, 0};
  const ThermalState hot = thermal::recoil_heat(start, 500, rb);
  const double dz = hot.temperature[2] - start.temperature[2];
  const double exact = 500.0 * 4.0 / 3.0 * rb.recoil_energy / constants::boltzmann;
  o.check(std::fabs(dz - exact) <= 1e-12 * exact, fmt::format("ΔT_axial = {:.4f} µK, ledger {:.4f} µK", dz * 1e6, exact * 1e6));
  o.check(std::fabs(exact - 120e-6) <= 2e-6, fmt::format("ledger value within ±2 µK of ≈120 µK ({:+.3f} µK)", (exact - 120e-6) * 1e6));
  double gained = 0.0;
  for (int i = 0; i < 3; ++i) gained += constants::boltzmann * (hot.temperature[i] - start.temperature[i]);
  const double want = 2.0 * rb.recoil_energy * 500.0;
  o.check(std::fabs(gained - want) <= 1e-12 * want,
          fmt::format("Σ k_B ΔT_i = {:.6e} J, 2·E_r·500 = {:.6e} J", gained, want));
  return o;
}

Outcome fit_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  const RunConfig c = load("stationary.json");
  const LineshapeParams truth = c.lineshape;
  const std::vector<double> want = {truth.linewidth, truth.shift, truth.overlap, truth.phase};
  const auto model = TruthModel::stationary(truth, c.pulse.detunings, c.peak_backscatter);
  std::vector<int> hits(4, 0);
  double chi2_sum = 0.0, overlap_err = 0.0;
  int failures = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const auto rec = photon::generate_run(model, c.pulse, c.detector, 10000 + s);
    std::vector<fit::DataRow> rows;
    for (const auto& r : photon::transmission_spectrum(rec, photon::background_correct(rec, c.detector), c.detector))
      rows.push_back({r.detuning, r.value, r.sigma});
    try {
      const auto r = fit::fit(fit::transmission_problem(rows, c.species.natural_linewidth));
      const auto err = fit::parameter_uncertainties(r);
      for (int k = 0; k < 4; ++k)
        if (std::fabs(r.parameters[k] - want[k]) <= 3.0 * err[k]) ++hits[k];
      chi2_sum += r.reduced_chi_squared;
      overlap_err += err[2];
    } catch (const std::exception&) {
      ++failures;
    }
  }
  const double elapsed = seconds_since(t0);
  const char* names[] = {"Γ", "δω", "Λ", "φ"};
  for (int k = 0; k < 4; ++k)
    o.check(hits[k] >= 180, fmt::format("{} within 3σ in {}/200 seeds (need ≥ 180)", names[k], hits[k]));
  const double mean_chi2 = chi2_sum / (seeds - failures);
  o.check(mean_chi2 >= 0.9 && mean_chi2 <= 1.1, fmt::format("mean χ²_red = {:.4f}, window [0.9, 1.1]", mean_chi2));
  o.check(failures == 0, fmt::format("{} fits raised errors", failures));
  o.check(elapsed < 60.0, fmt::format("runtime {:.2f} s, limit 60 s", elapsed));
  o.note(fmt::format("mean σ_Λ = {:.4f} pp at {} repetitions per detuning", 100.0 * overlap_err / (seeds - failures),
                     c.pulse.repetitions));
  return o;
}

Outcome thermal_model() {
  Outcome o;
  const auto t0 = Clock::now();
  const RunConfig c = load("heating.json");
  const std::vector<std::uint64_t> schedule = {0, 500};
  const auto points =
      thermal::heating_sweep(c.thermal, c.thermal_model(), schedule, c.sweep.detunings, c.samples, c.seed);
  const double elapsed = seconds_since(t0);
  if (!points[0].ok() || !points[1].ok()) {
    o.check(false, "heating sweep fits failed: " + points[0].error + points[1].error);
    return o;
  }
  const double gamma = rad_s_to_mhz(points[0].linewidth);
  const double reduction = 1.0 - points[1].extinction / points[0].extinction;
  const double downshift = rad_s_to_mhz(points[0].shift - points[1].shift);
  o.note(fmt::format("n_samples = {}, T = {} µK, α = {}, δω(0)/2π = {:.2f} MHz", c.samples,
                     c.thermal.temperature[0] * 1e6, c.alpha, rad_s_to_mhz(c.shifts.center_shift())));
  o.check(c.samples >= 100000, "n_samples ≥ 1e5");
  o.check(gamma >= 6.07 && gamma <= 6.7, fmt::format("effective linewidth at 21 µK = {:.3f} MHz, window [6.07, 6.7]", gamma));
  o.check(std::fabs(100.0 * reduction - 30.0) <= 8.0,
          fmt::format("extinction {:.2f}% → {:.2f}% after 500 photons: reduction {:.1f}%, target 30 ± 8",
                      100.0 * points[0].extinction, 100.0 * points[1].extinction, 100.0 * reduction));
  o.check(std::fabs(downshift - 1.5) <= 0.5,
          fmt::format("resonance downshift after 500 photons = {:.3f} MHz, target 1.5 ± 0.5", downshift));
  o.check(elapsed < 300.0, fmt::format("runtime {:.2f} s, limit 300 s", elapsed));
  return o;
}

Outcome zero_temperature() {
  Outcome o;
  const RunConfig c = load("heating.json", {{"thermal", {{"temperature_uk", {0, 0, 0}}}}});
  const auto& grid = c.sweep.detunings;
  for (Backend b : {Backend::serial, Backend::openmp}) {
    const auto s = thermal::thermal_average_transmission(c.thermal, c.thermal_model(), grid, c.samples, c.seed, b);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, std::fabs(s.mean_transmission[k] - spectra::transmission_at_detuning(c.lineshape, grid[k])));
    o.check(worst <= 1e-12, fmt::format("{} backend: max |⟨τ⟩ − τ| over {} detunings = {:.2e}",
                                        b == Backend::serial ? "serial" : "openmp", grid.size(), worst));
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "lightatom_acceptance";
  fs::remove_all(root);
  const RunConfig heating = load("heating.json", {{"samples", 20000}});
  const RunConfig stationary = load("stationary.json");
  const int saved = omp_get_max_threads();

  auto run_all = [&](const std::string& tag) {
    std::vector<fs::path> files;
    for (auto f : cli::cmd_simulate(stationary, root / tag / "stationary", cli::Format::csv)) files.push_back(f);
    for (auto f : cli::cmd_simulate(heating, root / tag / "heating", cli::Format::json)) files.push_back(f);
    for (auto f : cli::cmd_heating_sweep(heating, root / tag / "sweep", cli::Format::csv)) files.push_back(f);
    return files;
  };
  std::vector<std::vector<fs::path>> runs;
  std::vector<int> threads = {1, 2, 4, 1};
  for (std::size_t i = 0; i < threads.size(); ++i) {
    omp_set_num_threads(threads[i]);
    runs.push_back(run_all(fmt::format("run{}_t{}", i, threads[i])));
  }
  omp_set_num_threads(saved);

  std::size_t compared = 0, differing = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].size() != runs[0].size()) {
      ++differing;
      continue;
    }
    for (std::size_t k = 0; k < runs[0].size(); ++k) {
      ++compared;
      if (io::read_text(runs[i][k]) != io::read_text(runs[0][k])) ++differing;
    }
  }
  o.check(differing == 0 && compared > 0,
          fmt::format("{} artifact comparisons across worker counts {{1, 2, 4}} and a repeat, {} differ", compared,
                      differing));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "mode overlap at u = 0.45378", mode_overlap},
      {2, "extinction identity and measured extinction", extinction},
      {3, "saturation power and overlap from P_sat", saturation},
      {4, "recoil energy ledger", recoil},
      {5, "fit recovery over 200 synthetic spectra", fit_recovery},
      {6, "thermal model at 21 µK and after 500 photons", thermal_model},
      {7, "zero-temperature equivalence", zero_temperature},
      {8, "determinism across worker counts", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
