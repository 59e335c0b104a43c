#pragma once

// Nonlinear least-squares fits of the decay and oscillation shapes produced
// by the coherence experiments.

#include "donorqed/trace.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace donorqed::fit {

enum class Model {
  Exponential,          // a exp(-x/T) + b
  Stretched,            // a exp(-(x/T)^n) + b
  GaussianSinusoid,     // a exp(-(x/T)^2) cos(2 pi f x + phi) + b
  Sinusoid,             // a cos(2 pi f x + phi) + b
  SinSquaredHalfAngle,  // a sin^2(x/2)
};

std::string_view model_name(Model m);
Model parse_model(std::string_view name);
std::vector<std::string> parameter_names(Model m);

double evaluate(Model m, std::span<const double> params, double x);

struct Options {
  std::optional<std::vector<double>> initial;  // overrides the built-in starting points
  std::optional<double> frequency_hint;        // Hz (or cycles per x unit)
  int max_evaluations = 4000;
  double tolerance = 1e-12;
};

struct Result {
  Model model = Model::Exponential;
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> sigmas;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;  // sqrt of the residual sum of squares
  bool converged = false;
  int evaluations = 0;
  std::string status;

  /// Parameter by name; throws std::out_of_range when absent.
  double get(std::string_view name) const;
  double sigma(std::string_view name) const;
};

/// Requires at least (parameter count + 4) points. Deterministic for
/// identical input. A non-converged fit still returns the best iterate with
/// `converged == false`.
Result fit_decay(std::span<const double> x, std::span<const double> y, Model model, const Options& options = {});
Result fit_decay(const SignalTrace& trace, Model model, const Options& options = {});

/// Ordinary least-squares line y = intercept + slope x with standard errors.
struct LineFit {
  double slope = 0.0, intercept = 0.0;
  double slope_sigma = 0.0, intercept_sigma = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace donorqed::fit
