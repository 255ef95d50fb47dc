#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lightatom::fit {

struct DataRow {
  double x = 0.0;
  double y = 0.0;
  double sigma = 1.0;
};

enum class ModelId { transmission, reflection, saturation, linear, custom };

using ModelFunction = std::function<double(double x, std::span<const double> theta)>;

struct Model {
  ModelId id = ModelId::custom;
  std::string name;
  std::vector<std::string> parameter_names;
  /// Typical magnitude of each parameter; sets the finite-difference step
  /// floor when a parameter sits at zero.
  std::vector<double> scales;
  /// Parameters measured from an arbitrary origin, such as a resonance
  /// position. Their finite-difference step and convergence test use the
  /// scale alone, so results do not depend on where the origin sits.
  std::vector<bool> location;
  ModelFunction evaluate;

  std::size_t size() const { return parameter_names.size(); }
};

struct FitProblem {
  Model model;
  std::vector<DataRow> rows;
  std::vector<double> initial;
  std::vector<double> lower;
  std::vector<double> upper;

  /// Throws DomainError when sigma <= 0, sizes disagree, or there are not
  /// more rows than parameters.
  void validate() const;
};

struct FitOptions {
  int max_iterations = 500;
  double chi2_relative_tolerance = 1e-10;
  double step_tolerance = 1e-12;
  double jacobian_relative_step = 1e-6;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> parameters;
  Eigen::MatrixXd covariance;
  double chi_squared = 0.0;
  double reduced_chi_squared = 0.0;
  int degrees_of_freedom = 0;
  int iterations = 0;
  bool converged = false;
  bool covariance_psd = true;
  /// χ² after each accepted step, starting with the initial guess.
  std::vector<double> chi_squared_history;
};

/// Normal matrix is singular at the current point. `combination` holds the
/// (scaled) null direction; what() names the parameters involved.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, std::vector<double> combination)
      : std::runtime_error(what), combination_(std::move(combination)) {}
  const std::vector<double>& combination() const { return combination_; }

 private:
  std::vector<double> combination_;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, FitResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

/// Weighted Levenberg-Marquardt minimisation of Σ[(y − f(x;θ))/σ]².
FitResult fit(const FitProblem& problem, const FitOptions& options = {});

double chi_squared(const FitProblem& problem, std::span<const double> theta);
double reduced_chi_squared(const FitResult& result, const FitProblem& problem);
std::vector<double> parameter_uncertainties(const FitResult& result);

/// ∂f(x_i)/∂θ_j by forward differences with step rel·max(|θ_j|, scale_j).
/// Steps backward instead when the forward point would leave the bounds.
Eigen::MatrixXd forward_jacobian(const FitProblem& problem, std::span<const double> theta,
                                 double relative_step = 1e-6);
Eigen::MatrixXd central_jacobian(const FitProblem& problem, std::span<const double> theta,
                                 double relative_step = 1e-6);

/// y = θ0 + θ1·x
Model linear_model();

}  // namespace lightatom::fit
