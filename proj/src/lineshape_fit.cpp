#include "lightatom/lineshape_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lightatom/errors.hpp"

namespace lightatom::fit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const DataRow& min_row(const std::vector<DataRow>& rows) {
  if (rows.empty()) throw DomainError("fit: no data rows");
  return *std::min_element(rows.begin(), rows.end(),
                           [](const DataRow& a, const DataRow& b) { return a.y < b.y; });
}

const DataRow& max_row(const std::vector<DataRow>& rows) {
  if (rows.empty()) throw DomainError("fit: no data rows");
  return *std::max_element(rows.begin(), rows.end(),
                           [](const DataRow& a, const DataRow& b) { return a.y < b.y; });
}

}  // namespace

Model transmission_model() {
  Model m;
  m.id = ModelId::transmission;
  m.name = "transmission";
  m.parameter_names = {"linewidth", "shift", "overlap", "phase"};
  m.scales = {constants::rb87_d2_linewidth, constants::rb87_d2_linewidth, 0.01, 0.1};
  m.location = {false, true, false, false};
  m.evaluate = [](double x, std::span<const double> t) {
    return spectra::transmission_at_detuning(LineshapeParams::matched(t[0], t[1], t[2], t[3]), x);
  };
  return m;
}

Model reflection_model() {
  Model m;
  m.id = ModelId::reflection;
  m.name = "reflection";
  m.parameter_names = {"linewidth", "shift", "peak_probability"};
  m.scales = {constants::rb87_d2_linewidth, constants::rb87_d2_linewidth, 1e-3};
  m.location = {false, true, false};
  m.evaluate = [](double x, std::span<const double> t) {
    return spectra::reflection(t[2], t[0], t[1], x, 0.0);
  };
  return m;
}

Model saturation_model(double natural_linewidth) {
  Model m;
  m.id = ModelId::saturation;
  m.name = "saturation";
  m.parameter_names = {"saturation_power", "efficiency"};
  m.scales = {1e-12, 1e-3};
  m.evaluate = [natural_linewidth](double x, std::span<const double> t) {
    return spectra::backscatter_rate({t[0], t[1], x}, natural_linewidth);
  };
  return m;
}

FitProblem transmission_problem(std::vector<DataRow> rows, double natural_linewidth) {
  const auto& dip = min_row(rows);
  const double extinction = std::clamp(1.0 - dip.y, 0.0, 1.0);
  // Invert ε = 4Λ(1−Λ) on the lower branch; keep Λ off zero so the
  // remaining parameters are not degenerate at the start.
  const double overlap = std::max(0.5 * (1.0 - std::sqrt(1.0 - extinction)), 1e-3);
  FitProblem p;
  p.model = transmission_model();
  p.initial = {natural_linewidth, dip.x, overlap, 0.0};
  p.lower = {1e-6 * natural_linewidth, -kInf, 0.0, -constants::pi};
  p.upper = {kInf, kInf, 0.5, constants::pi};
  p.rows = std::move(rows);
  return p;
}

FitProblem reflection_problem(std::vector<DataRow> rows, double natural_linewidth) {
  const auto& peak = max_row(rows);
  FitProblem p;
  p.model = reflection_model();
  p.initial = {natural_linewidth, peak.x, std::clamp(peak.y, 1e-6, 1.0)};
  p.lower = {1e-6 * natural_linewidth, -kInf, 0.0};
  p.upper = {kInf, kInf, 1.0};
  p.rows = std::move(rows);
  return p;
}

FitProblem saturation_problem(std::vector<DataRow> rows, double natural_linewidth) {
  const auto& peak = max_row(rows);
  std::vector<double> powers;
  for (const auto& r : rows) powers.push_back(r.x);
  std::sort(powers.begin(), powers.end());
  const double p_sat = std::max(powers.at(powers.size() / 2), 1e-15);
  const double p_max = std::max(powers.back(), 1e-15);
  const double eta = std::clamp(2.0 * peak.y / natural_linewidth * (p_max + p_sat) / p_max, 1e-6, 1.0);
  FitProblem p;
  p.model = saturation_model(natural_linewidth);
  p.initial = {p_sat, eta};
  p.lower = {1e-18, 0.0};
  p.upper = {kInf, 1.0};
  p.rows = std::move(rows);
  return p;
}

LineshapeParams to_lineshape(const FitResult& r) {
  if (r.parameters.size() != 4) throw DomainError("to_lineshape: not a transmission fit");
  return LineshapeParams::matched(r.parameters[0], r.parameters[1], r.parameters[2], r.parameters[3]);
}

double fitted_extinction(const FitResult& r) { return spectra::resonant_dip(to_lineshape(r)); }

}  // namespace lightatom::fit
