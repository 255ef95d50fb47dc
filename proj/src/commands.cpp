#include "lightatom/commands.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "lightatom/artifacts.hpp"
#include "lightatom/counter_rng.hpp"
#include "lightatom/errors.hpp"
#include "lightatom/lineshape_fit.hpp"

namespace lightatom::cli {
namespace {

using nlohmann::json;
using std::filesystem::path;
using namespace constants;

constexpr std::uint64_t kSaturationStream = 0x5a7u;

class Writer {
 public:
  Writer(std::string command, const RunConfig& config, path dir, Format format)
      : command_(std::move(command)), seed_(config.seed), config_(config.document),
        dir_(std::move(dir)), format_(format) {}
  Writer(std::string command, std::uint64_t seed, json config, path dir, Format format)
      : command_(std::move(command)), seed_(seed), config_(std::move(config)), dir_(std::move(dir)),
        format_(format) {}

  void write(const std::string& name, const io::Table& table) {
    const io::ArtifactMeta meta{command_, name, seed_, config_};
    const path file = dir_ / (name + (format_ == Format::csv ? ".csv" : ".json"));
    io::write_text(file, format_ == Format::csv ? io::to_csv(meta, table) : io::to_json(meta, table));
    written_.push_back(file);
  }
  std::vector<path> files() const { return written_; }

 private:
  std::string command_;
  std::uint64_t seed_;
  json config_;
  path dir_;
  Format format_;
  std::vector<path> written_;
};

struct ModelUnits {
  fit::ModelId id;
  std::vector<std::string> names;
  std::vector<double> to_user;  // SI value × to_user = reported value
  double x_to_si;
};

ModelUnits units_for(const std::string& model) {
  const double per_mhz = 1.0 / (two_pi * 1e6);
  if (model == "transmission")
    return {fit::ModelId::transmission, {"linewidth_mhz", "shift_mhz", "overlap", "phase_rad"},
            {per_mhz, per_mhz, 1.0, 1.0}, two_pi * 1e6};
  if (model == "reflection")
    return {fit::ModelId::reflection, {"linewidth_mhz", "shift_mhz", "peak_probability"},
            {per_mhz, per_mhz, 1.0}, two_pi * 1e6};
  if (model == "saturation")
    return {fit::ModelId::saturation, {"saturation_power_pw", "efficiency"}, {1e12, 1.0}, 1e-12};
  throw DomainError(fmt::format("unknown model '{}' (expected transmission, reflection or saturation)", model));
}

Format format_of(const path& p) { return p.extension() == ".json" ? Format::json : Format::csv; }

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError(fmt::format("unknown format '{}' (expected csv or json)", name));
}

OverlapReport overlap_report(const RunConfig& c) {
  OverlapReport r;
  r.focusing_strength = c.system.focusing_strength();
  r.overlap = optics::mode_overlap_ideal(r.focusing_strength);
  r.extinction = optics::resonant_extinction(r.overlap);
  r.ideal_saturation_power = spectra::ideal_saturation_power(c.species);
  const auto focus = focal_geometry(c.system);
  r.focal_waist = focus.waist;
  r.focal_rayleigh_range = focus.rayleigh_range;
  r.alpha = c.alpha;
  r.effective_overlap = thermal::effective_overlap(r.overlap, c.alpha);
  return r;
}

std::vector<path> cmd_overlap(const RunConfig& c, const path& out_dir, Format format, std::ostream& out) {
  const OverlapReport r = overlap_report(c);
  out << fmt::format("focusing strength u       {:.6f}\n", r.focusing_strength)
      << fmt::format("mode overlap Lambda       {:.6f} ({:.2f} %)\n", r.overlap, 100.0 * r.overlap)
      << fmt::format("resonant extinction       {:.6f} ({:.2f} %)\n", r.extinction, 100.0 * r.extinction)
      << fmt::format("P_sat at Lambda = 1       {:.4f} pW\n", r.ideal_saturation_power * 1e12)
      << fmt::format("focal waist / Rayleigh    {:.4f} um / {:.4f} um\n", r.focal_waist * 1e6,
                     r.focal_rayleigh_range * 1e6)
      << fmt::format("{:<25} {:.6f}\n", fmt::format("effective overlap (a={})", r.alpha), r.effective_overlap);
  if (out_dir.empty()) return {};
  io::Table t;
  t.columns = {"focusing_strength", "overlap", "extinction", "ideal_saturation_power_pw",
               "focal_waist_um", "focal_rayleigh_range_um", "alpha", "effective_overlap"};
  t.rows.push_back({r.focusing_strength, r.overlap, r.extinction, r.ideal_saturation_power * 1e12,
                    r.focal_waist * 1e6, r.focal_rayleigh_range * 1e6, r.alpha, r.effective_overlap});
  Writer w("overlap", c, out_dir, format);
  w.write("overlap", t);
  return w.files();
}

std::vector<path> cmd_simulate(const RunConfig& c, const path& out_dir, Format format) {
  Writer w("simulate", c, out_dir, format);
  const ThermalModel model = c.thermal_model();
  const auto& grid = c.pulse.detunings;

  TruthModel truth;
  SampledSpectrum expected;
  if (c.pulse_heating) {
    std::vector<SampledSpectrum> table;
    ThermalState state = c.thermal;
    std::uint64_t applied = 0;
    for (std::uint64_t n : c.sweep.schedule) {
      state = thermal::recoil_heat(state, n - applied, c.species);
      applied = n;
      table.push_back(thermal::thermal_average_transmission(state, model, grid, c.samples, c.seed));
    }
    expected = table.front();
    truth = TruthModel::heating_table(c.sweep.schedule, std::move(table), c.lineshape, c.peak_backscatter);
  } else if (c.thermal_enabled()) {
    expected = thermal::thermal_average_transmission(c.thermal, model, grid, c.samples, c.seed);
    truth = TruthModel::sampled(expected, c.lineshape, c.peak_backscatter);
  } else {
    expected.detunings = grid;
    expected.n_samples = 1;
    expected.seed = c.seed;
    for (double d : grid) expected.mean_transmission.push_back(spectra::transmission_at_detuning(c.lineshape, d));
    expected.standard_error.assign(grid.size(), 0.0);
    truth = TruthModel::stationary(c.lineshape, grid, c.peak_backscatter);
  }

  const CountRecord record = photon::generate_run(truth, c.pulse, c.detector, c.seed);
  const CorrectedCounts corrected = photon::background_correct(record, c.detector);

  w.write("model", io::sampled_table(expected));
  w.write("counts", io::count_table(record));
  w.write("spectrum", io::spectrum_table(photon::transmission_spectrum(record, corrected, c.detector),
                                         "transmission"));
  w.write("reflection", io::spectrum_table(photon::backscatter_spectrum(record, corrected, c.detector), "p_b"));
  if (c.pulse_heating) w.write("binned", io::binned_table(photon::rebin_by_scattered(record, c.detector)));
  if (c.saturation) {
    const auto& s = *c.saturation;
    w.write("saturation", io::saturation_table(photon::generate_saturation_run(
                              s.saturation_power, s.efficiency, c.species.natural_linewidth, s.powers,
                              s.duration, s.repetitions, c.detector.background_b,
                              rng::derive_seed(c.seed, kSaturationStream))));
  }
  return w.files();
}

std::vector<path> cmd_heating_sweep(const RunConfig& c, const path& out_dir, Format format) {
  const auto points = thermal::heating_sweep(c.thermal, c.thermal_model(), c.sweep.schedule,
                                             c.sweep.detunings, c.samples, c.seed);
  Writer w("heating-sweep", c, out_dir, format);
  w.write("sweep", io::sweep_table(points));
  return w.files();
}

FitReport fit_report(const json& input) {
  const std::string model = input.at("model").get<std::string>();
  const ModelUnits u = units_for(model);
  const double linewidth = mhz_to_rad_s(input.at("natural_linewidth_mhz").get<double>());

  FitReport report;
  std::vector<fit::DataRow> rows;
  for (const auto& r : input.at("rows")) {
    const double x = r.at(0).is_null() ? NAN : r.at(0).get<double>();
    const double y = r.at(1).is_null() ? NAN : r.at(1).get<double>();
    const double s = r.at(2).is_null() ? NAN : r.at(2).get<double>();
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(s) || !(s > 0.0)) {
      ++report.excluded_rows;
      continue;
    }
    rows.push_back({x * u.x_to_si, y, s});
  }

  fit::FitProblem problem;
  switch (u.id) {
    case fit::ModelId::transmission: problem = fit::transmission_problem(std::move(rows), linewidth); break;
    case fit::ModelId::reflection: problem = fit::reflection_problem(std::move(rows), linewidth); break;
    default: problem = fit::saturation_problem(std::move(rows), linewidth); break;
  }
  report.result = fit::fit(problem);
  const auto& r = report.result;
  const auto errors = fit::parameter_uncertainties(r);

  json params = json::object();
  for (std::size_t k = 0; k < u.names.size(); ++k)
    params[u.names[k]] = {{"value", r.parameters[k] * u.to_user[k]}, {"error", errors[k] * u.to_user[k]}};
  json cov = json::array();
  for (std::size_t i = 0; i < u.names.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < u.names.size(); ++j)
      row.push_back(r.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * u.to_user[i] *
                    u.to_user[j]);
    cov.push_back(std::move(row));
  }

  json derived = json::object();
  if (u.id == fit::ModelId::transmission) {
    // Extinction error by first-order propagation through the covariance.
    const double eps = fit::fitted_extinction(r);
    Eigen::VectorXd grad(4);
    for (int k = 0; k < 4; ++k) {
      fit::FitResult moved = r;
      const double h = 1e-6 * std::max(std::fabs(r.parameters[k]), problem.model.scales[k]);
      moved.parameters[k] += h;
      grad[k] = (fit::fitted_extinction(moved) - eps) / h;
    }
    derived["extinction"] = {{"value", eps}, {"error", std::sqrt(grad.dot(r.covariance * grad))}};
  } else if (u.id == fit::ModelId::saturation) {
    const AtomSpecies species = AtomSpecies::make(constants::rb87_mass, input.value("wavelength_nm", 780.241209686) * 1e-9,
                                                  linewidth);
    const auto est = spectra::overlap_from_saturation(r.parameters[0], species);
    derived["overlap"] = {{"value", est.overlap},
                          {"error", est.overlap * errors[0] / r.parameters[0]},
                          {"model_consistent", est.model_consistent}};
  }

  report.document = {{"command", "fit"},
                     {"artifact", "fit_" + model},
                     {"seed", input.value("source_seed", std::uint64_t{0})},
                     {"config", input},
                     {"model", model},
                     {"parameters", params},
                     {"parameter_order", u.names},
                     {"covariance", cov},
                     {"chi_squared", r.chi_squared},
                     {"reduced_chi_squared", r.reduced_chi_squared},
                     {"degrees_of_freedom", r.degrees_of_freedom},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"covariance_psd", r.covariance_psd},
                     {"excluded_rows", report.excluded_rows},
                     {"derived", derived}};
  return report;
}

std::vector<path> cmd_fit(const path& data, const std::string& model, const path& out_dir) {
  units_for(model);
  const io::Artifact a = io::read_artifact(data);
  if (a.table.columns.size() < 3)
    throw IoError(fmt::format("'{}': need at least three columns (x, y, sigma)", data.string()));
  if (a.table.rows.empty()) throw IoError(fmt::format("'{}': no data rows", data.string()));

  json input = {{"model", model}, {"columns", {a.table.columns[0], a.table.columns[1], a.table.columns[2]}}};
  double linewidth_mhz = 6.07;
  double wavelength_nm = 780.241209686;
  if (a.has_meta && a.meta.config.contains("species")) {
    const auto& sp = a.meta.config["species"];
    linewidth_mhz = sp.value("linewidth_mhz", linewidth_mhz);
    wavelength_nm = sp.value("wavelength_nm", wavelength_nm);
  }
  input["natural_linewidth_mhz"] = linewidth_mhz;
  input["wavelength_nm"] = wavelength_nm;
  input["source_command"] = a.has_meta ? a.meta.command : "";
  input["source_artifact"] = a.has_meta ? a.meta.name : "";
  input["source_seed"] = a.meta.seed;
  json rows = json::array();
  for (const auto& r : a.table.rows) {
    json row = json::array();
    for (int k = 0; k < 3; ++k) row.push_back(std::isfinite(r[k]) ? json(r[k]) : json(nullptr));
    rows.push_back(std::move(row));
  }
  input["rows"] = std::move(rows);

  const FitReport report = fit_report(input);
  const path file = out_dir / ("fit_" + model + ".json");
  io::write_text(file, report.document.dump(2) + "\n");
  return {file};
}

std::vector<path> cmd_replay(const path& artifact, const path& out_dir) {
  const std::string text = io::read_text(artifact);
  const bool is_json = artifact.extension() == ".json";
  const io::Artifact a = is_json ? io::parse_json(text) : io::parse_csv(text);
  if (!a.has_meta) throw IoError(fmt::format("'{}' carries no provenance metadata", artifact.string()));
  const Format format = format_of(artifact);
  const std::string& cmd = a.meta.command;
  if (cmd == "fit") {
    const FitReport report = fit_report(a.meta.config);
    const path file = out_dir / ("fit_" + a.meta.config.at("model").get<std::string>() + ".json");
    io::write_text(file, report.document.dump(2) + "\n");
    return {file};
  }
  const RunConfig config = resolve_config(a.meta.config);
  if (cmd == "simulate") return cmd_simulate(config, out_dir, format);
  if (cmd == "heating-sweep") return cmd_heating_sweep(config, out_dir, format);
  if (cmd == "overlap") {
    std::ostringstream sink;
    return cmd_overlap(config, out_dir, format, sink);
  }
  throw IoError(fmt::format("'{}': unknown command '{}'", artifact.string(), cmd));
}

}  // namespace lightatom::cli
