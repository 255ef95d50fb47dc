#include "lightatom/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "lightatom/errors.hpp"

namespace lightatom::fit {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double magnitude(const Model& m, double value, std::size_t j) {
  const double scale = j < m.scales.size() ? m.scales[j] : 1.0;
  if (j < m.location.size() && m.location[j]) return scale;
  return std::max(std::fabs(value), scale);
}

double step_size(const FitProblem& p, std::span<const double> theta, std::size_t j, double rel) {
  return rel * magnitude(p.model, theta[j], j);
}

VectorXd weighted_residuals(const FitProblem& p, std::span<const double> theta) {
  VectorXd r(p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& row = p.rows[i];
    r[i] = (row.y - p.model.evaluate(row.x, theta)) / row.sigma;
  }
  return r;
}

MatrixXd weighted_jacobian(const FitProblem& p, std::span<const double> theta, double rel) {
  MatrixXd j = forward_jacobian(p, theta, rel);
  for (std::size_t i = 0; i < p.rows.size(); ++i) j.row(i) /= p.rows[i].sigma;
  return j;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string describe_combination(const std::vector<std::string>& names, const VectorXd& v) {
  std::ostringstream os;
  bool first = true;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::fabs(v[k]) < 0.1) continue;
    os << (first ? "" : (v[k] < 0 ? " - " : " + "));
    if (first && v[k] < 0) os << "-";
    os << fmt::format("{:.3f}*{}", std::fabs(v[k]), names[k]);
    first = false;
  }
  return os.str();
}

// Throws when the weighted normal matrix has no usable inverse. Works on the
// diagonally scaled matrix so that parameters of very different magnitude
// (rad/s next to a dimensionless overlap) are compared fairly.
void check_rank(const FitProblem& p, const MatrixXd& normal) {
  const auto n = normal.rows();
  VectorXd d(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(normal(k, k) > 0.0)) {
      VectorXd e = VectorXd::Zero(n);
      e[k] = 1.0;
      throw RankDeficientError(
          fmt::format("rank-deficient normal matrix: data do not constrain {}",
                      p.model.parameter_names[k]),
          to_std(e));
    }
    d[k] = 1.0 / std::sqrt(normal(k, k));
  }
  const MatrixXd scaled = d.asDiagonal() * normal * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(scaled);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (smallest <= 1e-13 * largest) {
    const VectorXd null_dir = eig.eigenvectors().col(0);
    throw RankDeficientError(
        fmt::format("rank-deficient normal matrix: degenerate combination {}",
                    describe_combination(p.model.parameter_names, null_dir)),
        to_std(null_dir));
  }
}

void project(const FitProblem& p, VectorXd& theta) {
  for (Eigen::Index k = 0; k < theta.size(); ++k)
    theta[k] = std::clamp(theta[k], p.lower[k], p.upper[k]);
}

// Damped Gauss-Newton step with parameters pinned at a bound removed when the
// step would push them further out.
VectorXd damped_step(const FitProblem& p, const MatrixXd& normal, const VectorXd& gradient,
                     const VectorXd& theta, double lambda) {
  const auto n = normal.rows();
  std::vector<bool> active(n, true);
  VectorXd step = VectorXd::Zero(n);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < n; ++k)
      if (active[k]) idx.push_back(k);
    if (idx.empty()) return VectorXd::Zero(n);
    const auto m = static_cast<Eigen::Index>(idx.size());
    MatrixXd a(m, m);
    VectorXd g(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      g[r] = gradient[idx[r]];
      for (Eigen::Index c = 0; c < m; ++c) a(r, c) = normal(idx[r], idx[c]);
      a(r, r) += lambda * std::max(normal(idx[r], idx[r]), std::numeric_limits<double>::min());
    }
    const VectorXd sub = a.ldlt().solve(g);
    step.setZero();
    for (Eigen::Index r = 0; r < m; ++r) step[idx[r]] = sub[r];

    bool changed = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[k]) continue;
      const bool at_lower = theta[k] <= p.lower[k] && step[k] < 0.0;
      const bool at_upper = theta[k] >= p.upper[k] && step[k] > 0.0;
      if (at_lower || at_upper) {
        active[k] = false;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return step;
}

FitResult finish(const FitProblem& p, const VectorXd& theta, double chi2, int iterations,
                 bool converged, std::vector<double> history, double rel_step) {
  FitResult out;
  out.names = p.model.parameter_names;
  out.parameters = to_std(theta);
  out.chi_squared = chi2;
  out.degrees_of_freedom = static_cast<int>(p.rows.size()) - static_cast<int>(p.model.size());
  out.reduced_chi_squared = chi2 / out.degrees_of_freedom;
  out.iterations = iterations;
  out.converged = converged;
  out.chi_squared_history = std::move(history);

  const MatrixXd j = weighted_jacobian(p, out.parameters, rel_step);
  const MatrixXd normal = j.transpose() * j;
  check_rank(p, normal);
  out.covariance = normal.ldlt().solve(MatrixXd::Identity(normal.rows(), normal.cols()));
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.covariance, Eigen::EigenvaluesOnly);
  out.covariance_psd = eig.eigenvalues().minCoeff() >= -1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

void FitProblem::validate() const {
  const auto n = model.size();
  if (!model.evaluate) throw DomainError("FitProblem: model has no evaluator");
  if (initial.size() != n || lower.size() != n || upper.size() != n)
    throw DomainError("FitProblem: parameter vector sizes disagree with the model");
  if (rows.size() <= n)
    throw DomainError(fmt::format("FitProblem: need more than {} data rows, got {}", n, rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!(r.sigma > 0.0) || !std::isfinite(r.sigma) || !std::isfinite(r.x) || !std::isfinite(r.y))
      throw DomainError(fmt::format("FitProblem: row {} has non-finite values or sigma <= 0", i));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(initial[k]))
      throw DomainError("FitProblem: initial guess must be finite");
    if (lower[k] > upper[k]) throw DomainError("FitProblem: lower bound above upper bound");
  }
}

Eigen::MatrixXd forward_jacobian(const FitProblem& p, std::span<const double> theta, double rel) {
  const auto n = theta.size();
  MatrixXd jac(p.rows.size(), n);
  std::vector<double> base(theta.begin(), theta.end());
  std::vector<double> f0(p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) f0[i] = p.model.evaluate(p.rows[i].x, base);
  for (std::size_t j = 0; j < n; ++j) {
    double h = step_size(p, theta, j, rel);
    if (!p.upper.empty() && theta[j] + h > p.upper[j]) h = -h;
    std::vector<double> moved = base;
    moved[j] += h;
    const double actual = moved[j] - base[j];
    for (std::size_t i = 0; i < p.rows.size(); ++i)
      jac(i, j) = (p.model.evaluate(p.rows[i].x, moved) - f0[i]) / actual;
  }
  return jac;
}

Eigen::MatrixXd central_jacobian(const FitProblem& p, std::span<const double> theta, double rel) {
  const auto n = theta.size();
  MatrixXd jac(p.rows.size(), n);
  std::vector<double> base(theta.begin(), theta.end());
  for (std::size_t j = 0; j < n; ++j) {
    const double h = step_size(p, theta, j, rel);
    std::vector<double> plus = base, minus = base;
    plus[j] += h;
    minus[j] -= h;
    for (std::size_t i = 0; i < p.rows.size(); ++i)
      jac(i, j) = (p.model.evaluate(p.rows[i].x, plus) - p.model.evaluate(p.rows[i].x, minus)) /
                  (plus[j] - minus[j]);
  }
  return jac;
}

double chi_squared(const FitProblem& p, std::span<const double> theta) {
  return weighted_residuals(p, theta).squaredNorm();
}

FitResult fit(const FitProblem& p, const FitOptions& opt) {
  p.validate();
  const auto n = static_cast<Eigen::Index>(p.model.size());
  VectorXd theta = Eigen::Map<const VectorXd>(p.initial.data(), n);
  project(p, theta);

  auto chi2_of = [&](const VectorXd& t) {
    return chi_squared(p, std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
  };
  auto jac_of = [&](const VectorXd& t) {
    return weighted_jacobian(p, std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                             opt.jacobian_relative_step);
  };

  double chi2 = chi2_of(theta);
  std::vector<double> history{chi2};
  MatrixXd j = jac_of(theta);
  MatrixXd normal = j.transpose() * j;
  check_rank(p, normal);
  VectorXd gradient = j.transpose() * weighted_residuals(p, to_std(theta));

  double lambda = 1e-3;
  int iteration = 0;
  bool converged = chi2 == 0.0;
  while (!converged) {
    if (iteration >= opt.max_iterations) {
      FitResult best = finish(p, theta, chi2, iteration, false, history, opt.jacobian_relative_step);
      throw NonConvergenceError(
          fmt::format("fit did not converge within {} iterations (chi2 = {})", opt.max_iterations, chi2),
          std::move(best));
    }
    ++iteration;

    const VectorXd step = damped_step(p, normal, gradient, theta, lambda);
    VectorXd trial = theta + step;
    project(p, trial);
    const double trial_chi2 = chi2_of(trial);

    if (std::isfinite(trial_chi2) && trial_chi2 < chi2) {
      const double drop = (chi2 - trial_chi2) / std::max(chi2, std::numeric_limits<double>::min());
      double step_norm = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double scale = magnitude(p.model, theta[k], static_cast<std::size_t>(k));
        step_norm = std::hypot(step_norm, (trial[k] - theta[k]) / scale);
      }
      theta = trial;
      chi2 = trial_chi2;
      history.push_back(chi2);
      lambda = std::max(lambda * 0.3, 1e-12);
      if (drop < opt.chi2_relative_tolerance || step_norm < opt.step_tolerance || chi2 == 0.0) {
        converged = true;
        break;
      }
      j = jac_of(theta);
      normal = j.transpose() * j;
      gradient = j.transpose() * weighted_residuals(p, to_std(theta));
    } else {
      lambda *= 10.0;
      // No direction reduces χ² any further: the current point is a minimum
      // to working precision.
      if (lambda > 1e16) converged = true;
    }
  }
  return finish(p, theta, chi2, iteration, true, std::move(history), opt.jacobian_relative_step);
}

double reduced_chi_squared(const FitResult& result, const FitProblem& problem) {
  const int dof = static_cast<int>(problem.rows.size()) - static_cast<int>(problem.model.size());
  if (dof <= 0) throw DomainError("reduced_chi_squared: no degrees of freedom");
  return chi_squared(problem, result.parameters) / dof;
}

std::vector<double> parameter_uncertainties(const FitResult& result) {
  std::vector<double> errors(result.parameters.size());
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double v = result.covariance(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    errors[k] = v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
  }
  return errors;
}

Model linear_model() {
  Model m;
  m.id = ModelId::linear;
  m.name = "linear";
  m.parameter_names = {"intercept", "slope"};
  m.scales = {1.0, 1.0};
  m.evaluate = [](double x, std::span<const double> t) { return t[0] + t[1] * x; };
  return m;
}

}  // namespace lightatom::fit
