#include "lightatom/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "lightatom/errors.hpp"

namespace lightatom {
namespace {

using nlohmann::json;
using namespace constants;

class Section {
 public:
  Section(json& root, std::string name, std::set<std::string> allowed)
      : name_(std::move(name)) {
    if (!root.contains(name_)) root[name_] = json::object();
    node_ = &root[name_];
    if (!node_->is_object()) throw ConfigError(fmt::format("'{}' must be an object", name_));
    for (const auto& [key, value] : node_->items())
      if (!allowed.count(key)) throw ConfigError(fmt::format("unknown key '{}.{}'", name_, key));
  }

  bool has(const std::string& key) const { return node_->contains(key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) (*node_)[key] = fallback;
    const json& v = (*node_)[key];
    if (!v.is_number()) throw ConfigError(fmt::format("'{}' must be a number", path(key)));
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(fmt::format("'{}' must be finite", path(key)));
    return x;
  }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(fmt::format("'{}' must be positive", path(key)));
    return x;
  }

  double non_negative(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (x < 0.0) throw ConfigError(fmt::format("'{}' must be non-negative", path(key)));
    return x;
  }

  double unit_interval(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (x < 0.0 || x > 1.0) throw ConfigError(fmt::format("'{}' must lie in [0, 1]", path(key)));
    return x;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) (*node_)[key] = fallback;
    const json& v = (*node_)[key];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError(fmt::format("'{}' must be a non-negative integer", path(key)));
    return v.get<std::uint64_t>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) (*node_)[key] = fallback;
    const json& v = (*node_)[key];
    if (!v.is_boolean()) throw ConfigError(fmt::format("'{}' must be true or false", path(key)));
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) (*node_)[key] = fallback;
    const json& v = (*node_)[key];
    if (!v.is_array()) throw ConfigError(fmt::format("'{}' must be an array", path(key)));
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(fmt::format("'{}' must contain numbers", path(key)));
      out.push_back(e.get<double>());
    }
    return out;
  }

  void set(const std::string& key, const json& value) { (*node_)[key] = value; }
  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  json* node_ = nullptr;
};

std::vector<double> detuning_grid(Section& s, double start, double stop, std::uint64_t points) {
  const double a = s.number("detuning_start_mhz", start);
  const double b = s.number("detuning_stop_mhz", stop);
  const auto n = s.count("detuning_points", points);
  if (n < 2) throw ConfigError(fmt::format("'{}' must be at least 2", s.path("detuning_points")));
  if (!(b > a)) throw ConfigError(fmt::format("'{}' must exceed the start", s.path("detuning_stop_mhz")));
  std::vector<double> grid(n);
  for (std::uint64_t i = 0; i < n; ++i)
    grid[i] = mhz_to_rad_s(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return grid;
}

}  // namespace

bool RunConfig::thermal_enabled() const {
  return std::any_of(thermal.temperature.begin(), thermal.temperature.end(),
                     [](double t) { return t > 0.0; });
}

ThermalModel RunConfig::thermal_model() const {
  return ThermalModel{species, trap, system, shifts, lineshape};
}

RunConfig resolve_config(const nlohmann::json& input) {
  if (!input.is_object()) throw ConfigError("configuration must be a JSON object");
  static const std::set<std::string> top_keys = {"seed",   "samples",    "species",    "optics",
                                                 "detector", "trap",     "shifts",     "lineshape",
                                                 "thermal", "pulse",     "reflection", "saturation",
                                                 "sweep"};
  for (const auto& [key, value] : input.items())
    if (!top_keys.count(key)) throw ConfigError(fmt::format("unknown key '{}'", key));

  RunConfig c;
  json doc = input;

  if (!doc.contains("seed")) doc["seed"] = 1;
  if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
    throw ConfigError("'seed' must be a non-negative integer");
  c.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("samples")) doc["samples"] = 100000;
  if (!doc["samples"].is_number_integer() || doc["samples"].get<std::int64_t>() < 1)
    throw ConfigError("'samples' must be a positive integer");
  c.samples = doc["samples"].get<std::size_t>();

  {
    Section s(doc, "species", {"mass_amu", "wavelength_nm", "linewidth_mhz"});
    c.species = AtomSpecies::make(s.positive("mass_amu", 86.909180531) * atomic_mass_unit,
                                  s.positive("wavelength_nm", 780.241209686) * 1e-9,
                                  mhz_to_rad_s(s.positive("linewidth_mhz", 6.07)));
  }
  {
    Section s(doc, "optics", {"focal_length_mm", "input_waist_mm", "numerical_aperture",
                              "collection_mode_overlap"});
    c.system.focal_length = s.positive("focal_length_mm", 5.95) * 1e-3;
    c.system.input_waist = s.positive("input_waist_mm", 2.7) * 1e-3;
    c.system.numerical_aperture = s.positive("numerical_aperture", 0.75);
    if (c.system.numerical_aperture >= 1.0)
      throw ConfigError("'optics.numerical_aperture' must be below 1");
    c.system.collection_mode_overlap = s.unit_interval("collection_mode_overlap", 0.7);
    c.system.wavelength = c.species.transition_wavelength;
  }
  {
    Section s(doc, "detector", {"eta_f", "eta_b", "eta_op", "background_f_cps", "background_b_cps"});
    c.detector.eta_f = s.unit_interval("eta_f", 0.56);
    c.detector.eta_b = s.unit_interval("eta_b", 0.59);
    c.detector.eta_op = s.unit_interval("eta_op", 0.59);
    c.detector.background_f = s.non_negative("background_f_cps", 155.0);
    c.detector.background_b = s.non_negative("background_b_cps", 300.0);
    c.system.eta_f = c.detector.eta_f;
    c.system.eta_b = c.detector.eta_b;
    c.system.eta_op = c.detector.eta_op;
  }
  {
    Section s(doc, "trap", {"depth_mk", "frequencies_khz", "waist_um", "wavelength_nm"});
    c.trap.depth = boltzmann * s.positive("depth_mk", 2.22) * 1e-3;
    const auto f = s.numbers("frequencies_khz", {107.0, 124.0, 13.8});
    if (f.size() != 3 || std::any_of(f.begin(), f.end(), [](double v) { return !(v > 0.0); }))
      throw ConfigError("'trap.frequencies_khz' must hold three positive values");
    for (int i = 0; i < 3; ++i) c.trap.omega[i] = khz_to_rad_s(f[i]);
    c.trap.waist = s.positive("waist_um", 1.4) * 1e-6;
    c.trap.wavelength = s.positive("wavelength_nm", 852.0) * 1e-9;
  }
  {
    Section s(doc, "shifts", {"bias_field_mt", "zeeman_mhz", "ac_stark_peak_mhz", "g_lower", "m_lower",
                              "g_upper", "m_upper"});
    const double field = s.number("bias_field_mt", 0.74);
    const double g_lower = s.number("g_lower", 0.5);
    const double m_lower = s.number("m_lower", -2);
    const double g_upper = s.number("g_upper", 2.0 / 3.0);
    const double m_upper = s.number("m_upper", -3);
    if (!s.has("zeeman_mhz"))
      s.set("zeeman_mhz", rad_s_to_mhz(optics::zeeman_shift(field * 1e-3, g_lower, static_cast<int>(m_lower),
                                                            g_upper, static_cast<int>(m_upper))));
    c.shifts.bias_field = field * 1e-3;
    c.shifts.zeeman = mhz_to_rad_s(s.number("zeeman_mhz", 0.0));
    c.shifts.ac_stark_peak = mhz_to_rad_s(s.number("ac_stark_peak_mhz", 37.67));
  }
  {
    Section s(doc, "thermal", {"temperature_uk", "alpha"});
    const auto t = s.numbers("temperature_uk", {0.0, 0.0, 0.0});
    if (t.size() != 3 || std::any_of(t.begin(), t.end(), [](double v) { return !(v >= 0.0); }))
      throw ConfigError("'thermal.temperature_uk' must hold three non-negative values");
    for (int i = 0; i < 3; ++i) c.thermal.temperature[i] = t[i] * 1e-6;
    c.alpha = s.unit_interval("alpha", 0.0);
  }
  {
    Section s(doc, "lineshape", {"linewidth_mhz", "overlap", "phase_rad", "amplitude_mhz"});
    const double linewidth = s.positive("linewidth_mhz", rad_s_to_mhz(c.species.natural_linewidth));
    if (!s.has("overlap"))
      s.set("overlap", thermal::effective_overlap(optics::mode_overlap_ideal(c.system.focusing_strength()),
                                                  c.alpha));
    const double overlap = s.unit_interval("overlap", 0.0);
    const double phase = s.number("phase_rad", 0.0);
    if (!(phase > -pi && phase <= pi)) throw ConfigError("'lineshape.phase_rad' must lie in (-pi, pi]");
    const double amplitude = s.number("amplitude_mhz", linewidth * overlap);
    c.lineshape = {mhz_to_rad_s(linewidth), c.shifts.center_shift(), overlap, phase,
                   mhz_to_rad_s(amplitude)};
  }
  {
    Section s(doc, "pulse", {"duration_ms", "mean_photons", "bin_width_ms", "repetitions",
                             "detuning_start_mhz", "detuning_stop_mhz", "detuning_points", "heating"});
    c.pulse.duration = s.positive("duration_ms", 20.0) * 1e-3;
    c.pulse.mean_incident_photons = s.non_negative("mean_photons", 550.0);
    c.pulse.bin_width = s.positive("bin_width_ms", 0.5) * 1e-3;
    c.pulse.repetitions = s.count("repetitions", 2000);
    const double centre = rad_s_to_mhz(c.shifts.center_shift());
    c.pulse.detunings = detuning_grid(s, std::round(centre) - 15.0, std::round(centre) + 15.0, 21);
    c.pulse_heating = s.flag("heating", false);
    try {
      c.pulse.validate();
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("pulse: {}", e.what()));
    }
  }
  {
    Section s(doc, "reflection", {"peak_probability"});
    c.peak_backscatter = s.unit_interval("peak_probability", 0.0061);
  }
  if (doc.contains("saturation")) {
    Section s(doc, "saturation", {"saturation_power_pw", "efficiency", "powers_pw", "duration_us", "repetitions"});
    SaturationScan scan;
    scan.saturation_power = s.positive("saturation_power_pw", 26.0) * 1e-12;
    scan.efficiency = s.unit_interval("efficiency", 0.0195);
    for (double p : s.numbers("powers_pw", {2, 5, 10, 15, 20, 30, 40, 60, 80, 100, 150, 200})) {
      if (!(p >= 0.0)) throw ConfigError("'saturation.powers_pw' must be non-negative");
      scan.powers.push_back(p * 1e-12);
    }
    scan.duration = s.positive("duration_us", 4.0) * 1e-6;
    scan.repetitions = s.count("repetitions", 200000);
    if (scan.repetitions < 1) throw ConfigError("'saturation.repetitions' must be positive");
    c.saturation = scan;
  }
  {
    Section s(doc, "sweep", {"photon_schedule", "detuning_start_mhz", "detuning_stop_mhz", "detuning_points"});
    std::vector<double> fallback;
    for (int n = 0; n <= 480; n += 30) fallback.push_back(n);
    for (double n : s.numbers("photon_schedule", fallback)) {
      if (!(n >= 0.0) || n != std::floor(n))
        throw ConfigError("'sweep.photon_schedule' must hold non-negative integers");
      c.sweep.schedule.push_back(static_cast<std::uint64_t>(n));
    }
    if (!std::is_sorted(c.sweep.schedule.begin(), c.sweep.schedule.end()))
      throw ConfigError("'sweep.photon_schedule' must be nondecreasing");
    const double centre = rad_s_to_mhz(c.shifts.center_shift());
    c.sweep.detunings = detuning_grid(s, std::round(centre) - 25.0, std::round(centre) + 25.0, 101);
  }

  c.document = std::move(doc);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return resolve_config(doc);
}

}  // namespace lightatom
