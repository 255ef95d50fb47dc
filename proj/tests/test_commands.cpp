#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lightatom/artifacts.hpp"
#include "lightatom/commands.hpp"
#include "lightatom/errors.hpp"

using namespace lightatom;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(LIGHTATOM_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lightatom_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void expect_same_files(const std::vector<fs::path>& a, const std::vector<fs::path>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(a[i].filename().string());
    CHECK(a[i].filename() == b[i].filename());
    CHECK(io::read_text(a[i]) == io::read_text(b[i]));
  }
}

RunConfig config(const std::string& name, json overrides = json::object()) {
  json doc = json::parse(io::read_text(kConfigs / name));
  doc.merge_patch(overrides);
  return resolve_config(doc);
}

}  // namespace

TEST_CASE("overlap report") {
  const auto now = cli::overlap_report(config("stationary.json"));
  CHECK(now.overlap == doctest::Approx(0.112).epsilon(0.005));
  const auto legacy = cli::overlap_report(config("legacy_na055.json"));
  CHECK(legacy.overlap < now.overlap);
  CHECK(now.overlap / legacy.overlap > 1.5);
  std::ostringstream out;
  cli::cmd_overlap(config("stationary.json"), {}, cli::Format::csv, out);
  CHECK(out.str().find("11.16 %") != std::string::npos);
}

TEST_CASE("simulate at zero temperature writes the stationary spectrum") {
  const auto dir = scratch("sim_t0");
  const RunConfig c = config("stationary.json");
  const auto files = cli::cmd_simulate(c, dir, cli::Format::csv);
  CHECK(files.size() == 4);
  const auto model = io::read_artifact(dir / "model.csv");
  for (std::size_t k = 0; k < model.table.rows.size(); ++k) {
    const double d = constants::mhz_to_rad_s(model.table.rows[k][0]);
    CHECK(model.table.rows[k][1] == doctest::Approx(spectra::transmission_at_detuning(c.lineshape, d)).epsilon(1e-14));
  }
  const auto spectrum = io::read_artifact(dir / "spectrum.csv");
  const auto lowest = std::min_element(spectrum.table.rows.begin(), spectrum.table.rows.end(),
                                       [](const auto& a, const auto& b) { return a[1] < b[1]; });
  CHECK(std::fabs((*lowest)[1] - 0.823) < 3.0 * (*lowest)[2] + 0.002);
  CHECK(spectrum.meta.seed == c.seed);
  CHECK(spectrum.meta.config == c.document);
}

TEST_CASE("simulate is byte-identical for a fixed seed and any thread count") {
  const RunConfig c = config("heating.json", {{"samples", 8000}, {"pulse", {{"repetitions", 20}}}});
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = cli::cmd_simulate(c, scratch("det_a"), cli::Format::csv);
  omp_set_num_threads(4);
  const auto b = cli::cmd_simulate(c, scratch("det_b"), cli::Format::csv);
  omp_set_num_threads(saved);
  CHECK(a.size() == 5);
  expect_same_files(a, b);
}

TEST_CASE("replay reproduces every artifact kind") {
  SUBCASE("simulate csv") {
    const auto first = cli::cmd_simulate(config("saturation.json"), scratch("rep_a"), cli::Format::csv);
    const auto again = cli::cmd_replay(first[2], scratch("rep_b"));
    expect_same_files(first, again);
  }
  SUBCASE("simulate json") {
    const auto first = cli::cmd_simulate(config("stationary.json"), scratch("rep_c"), cli::Format::json);
    const auto again = cli::cmd_replay(first[0], scratch("rep_d"));
    expect_same_files(first, again);
  }
  SUBCASE("heating sweep") {
    const RunConfig c = config("heating.json", {{"samples", 4000}, {"sweep", {{"photon_schedule", {0, 240, 480}}}}});
    const auto first = cli::cmd_heating_sweep(c, scratch("rep_e"), cli::Format::csv);
    const auto again = cli::cmd_replay(first[0], scratch("rep_f"));
    expect_same_files(first, again);
  }
  SUBCASE("fit report") {
    const auto sim = cli::cmd_simulate(config("stationary.json"), scratch("rep_g"), cli::Format::csv);
    const auto first = cli::cmd_fit(sim[2], "transmission", scratch("rep_h"));
    const auto again = cli::cmd_replay(first[0], scratch("rep_i"));
    expect_same_files(first, again);
  }
  SUBCASE("overlap") {
    std::ostringstream sink;
    const auto first = cli::cmd_overlap(config("legacy_na055.json"), scratch("rep_j"), cli::Format::json, sink);
    const auto again = cli::cmd_replay(first[0], scratch("rep_k"));
    expect_same_files(first, again);
  }
}

TEST_CASE("fit round trip recovers the simulated truth") {
  const auto sim_dir = scratch("fit_sim");
  const RunConfig c = config("stationary.json");
  cli::cmd_simulate(c, sim_dir, cli::Format::csv);
  const auto out = scratch("fit_out");
  const auto file = cli::cmd_fit(sim_dir / "spectrum.csv", "transmission", out);
  const json report = json::parse(io::read_text(file[0]));
  const auto& p = report["parameters"];
  auto within = [&](const char* name, double truth) {
    CAPTURE(name);
    CHECK(std::fabs(p[name]["value"].get<double>() - truth) <= 3.0 * p[name]["error"].get<double>());
  };
  within("linewidth_mhz", 6.9);
  within("shift_mhz", 48.03);
  within("overlap", 0.0467);
  within("phase_rad", 0.13);
  CHECK(report["converged"].get<bool>());
  CHECK(report["seed"] == c.seed);

  const auto refl = cli::cmd_fit(sim_dir / "reflection.csv", "reflection", out);
  const json r = json::parse(io::read_text(refl[0]));
  const double pb0 = r["parameters"]["peak_probability"]["value"];
  const double err = r["parameters"]["peak_probability"]["error"];
  CHECK(std::fabs(pb0 - 0.0061) <= 3.0 * err);
}

TEST_CASE("saturation fit reports the overlap") {
  const auto dir = scratch("fit_sat");
  cli::cmd_simulate(config("saturation.json"), dir, cli::Format::json);
  const auto file = cli::cmd_fit(dir / "saturation.json", "saturation", dir);
  const json report = json::parse(io::read_text(file[0]));
  const double psat = report["parameters"]["saturation_power_pw"]["value"];
  const double err = report["parameters"]["saturation_power_pw"]["error"];
  CHECK(std::fabs(psat - 26.0) <= 3.0 * err);
  const double overlap = report["derived"]["overlap"]["value"];
  CHECK(overlap > 0.043);
  CHECK(overlap < 0.051);
}

TEST_CASE("fit input errors") {
  const auto dir = scratch("fit_bad");
  io::write_text(dir / "empty.csv", "");
  CHECK_THROWS_WITH_AS(cli::cmd_fit(dir / "empty.csv", "transmission", dir), doctest::Contains("empty input"),
                       IoError);
  io::write_text(dir / "bad.csv", "x,y,sigma\n1,0.9,0.01\n2,oops,0.01\n");
  CHECK_THROWS_WITH_AS(cli::cmd_fit(dir / "bad.csv", "transmission", dir), doctest::Contains("line 3"), IoError);
  CHECK_THROWS_AS(cli::cmd_fit(dir / "missing.csv", "transmission", dir), IoError);
  io::write_text(dir / "ok.csv", "x,y,sigma\n1,0.9,0.01\n2,0.8,0.01\n");
  CHECK_THROWS_AS(cli::cmd_fit(dir / "ok.csv", "gaussian", dir), DomainError);
}

TEST_CASE("flagged rows are excluded and counted") {
  const auto dir = scratch("fit_flag");
  std::string csv = "detuning_mhz,transmission,sigma\n";
  const auto p = LineshapeParams::matched(constants::mhz_to_rad_s(6.07), constants::mhz_to_rad_s(47.0), 0.05);
  for (int i = 0; i < 21; ++i) {
    const double x = 32.0 + 1.5 * i;
    csv += fmt::format("{},{},0.002\n", x, spectra::transmission_at_detuning(p, constants::mhz_to_rad_s(x)));
  }
  csv += "70,nan,nan\n";
  io::write_text(dir / "flagged.csv", csv);
  const auto file = cli::cmd_fit(dir / "flagged.csv", "transmission", dir);
  const json report = json::parse(io::read_text(file[0]));
  CHECK(report["excluded_rows"] == 1);
  CHECK(report["parameters"]["overlap"]["value"].get<double>() == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("zero-photon heating sweep is flat") {
  const RunConfig c = config("heating.json", {{"samples", 4000}, {"sweep", {{"photon_schedule", {0, 0, 0}}}}});
  const auto files = cli::cmd_heating_sweep(c, scratch("flat"), cli::Format::csv);
  const auto a = io::read_artifact(files[0]);
  REQUIRE(a.table.rows.size() == 3);
  CHECK(a.table.rows[1] == a.table.rows[0]);
  CHECK(a.table.rows[2] == a.table.rows[0]);
}
