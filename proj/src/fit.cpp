#include "donorqed/fit.hpp"

#include "donorqed/constants.hpp"

#include <unsupported/Eigen/LevenbergMarquardt>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace donorqed::fit {

using units::kTwoPi;

std::string_view model_name(Model m) {
  switch (m) {
    case Model::Exponential: return "exponential";
    case Model::Stretched: return "stretched";
    case Model::GaussianSinusoid: return "gaussian-sinusoid";
    case Model::Sinusoid: return "sinusoid";
    case Model::SinSquaredHalfAngle: return "sin2-half-angle";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  for (auto m : {Model::Exponential, Model::Stretched, Model::GaussianSinusoid, Model::Sinusoid,
                 Model::SinSquaredHalfAngle})
    if (model_name(m) == name) return m;
  throw std::invalid_argument("unknown fit model '" + std::string(name) + "'");
}

std::vector<std::string> parameter_names(Model m) {
  switch (m) {
    case Model::Exponential: return {"a", "T", "b"};
    case Model::Stretched: return {"a", "T", "n", "b"};
    case Model::GaussianSinusoid: return {"a", "T", "f", "phi", "b"};
    case Model::Sinusoid: return {"a", "f", "phi", "b"};
    case Model::SinSquaredHalfAngle: return {"a"};
  }
  return {};
}

namespace {

// Parameters optimised in log space to keep them positive.
std::vector<bool> log_params(Model m) {
  switch (m) {
    case Model::Exponential: return {false, true, false};
    case Model::Stretched: return {false, true, true, false};
    case Model::GaussianSinusoid: return {false, true, false, false, false};
    case Model::Sinusoid: return {false, false, false, false};
    case Model::SinSquaredHalfAngle: return {false};
  }
  return {};
}

// Value and gradient with respect to the natural parameters.
double value_and_gradient(Model m, std::span<const double> p, double x, double* grad) {
  switch (m) {
    case Model::Exponential: {
      const double e = std::exp(-x / p[1]);
      if (grad) {
        grad[0] = e;
        grad[1] = p[0] * e * x / (p[1] * p[1]);
        grad[2] = 1.0;
      }
      return p[0] * e + p[2];
    }
    case Model::Stretched: {
      const double r = std::max(x, 0.0) / p[1];
      const double rn = r > 0.0 ? std::pow(r, p[2]) : 0.0;
      const double e = std::exp(-rn);
      if (grad) {
        grad[0] = e;
        grad[1] = p[0] * e * rn * p[2] / p[1];
        grad[2] = r > 0.0 ? -p[0] * e * rn * std::log(r) : 0.0;
        grad[3] = 1.0;
      }
      return p[0] * e + p[3];
    }
    case Model::GaussianSinusoid: {
      const double r = x / p[1];
      const double env = std::exp(-r * r);
      const double arg = kTwoPi * p[2] * x + p[3];
      const double c = std::cos(arg), s = std::sin(arg);
      if (grad) {
        grad[0] = env * c;
        grad[1] = p[0] * env * c * 2.0 * r * r / p[1];
        grad[2] = -p[0] * env * s * kTwoPi * x;
        grad[3] = -p[0] * env * s;
        grad[4] = 1.0;
      }
      return p[0] * env * c + p[4];
    }
    case Model::Sinusoid: {
      const double arg = kTwoPi * p[1] * x + p[2];
      const double c = std::cos(arg), s = std::sin(arg);
      if (grad) {
        grad[0] = c;
        grad[1] = -p[0] * s * kTwoPi * x;
        grad[2] = -p[0] * s;
        grad[3] = 1.0;
      }
      return p[0] * c + p[3];
    }
    case Model::SinSquaredHalfAngle: {
      const double s = std::sin(0.5 * x);
      if (grad) grad[0] = s * s;
      return p[0] * s * s;
    }
  }
  return 0.0;
}

struct Problem : Eigen::DenseFunctor<double> {
  Model model;
  std::span<const double> x, y;
  std::vector<bool> logp;
  mutable int evaluations = 0;

  Problem(Model m, std::span<const double> xs, std::span<const double> ys)
      : Eigen::DenseFunctor<double>(static_cast<int>(parameter_names(m).size()), static_cast<int>(xs.size())),
        model(m), x(xs), y(ys), logp(log_params(m)) {}

  std::vector<double> natural(const Eigen::VectorXd& u) const {
    std::vector<double> p(u.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) p[k] = logp[k] ? std::exp(u[k]) : u[k];
    return p;
  }

  int operator()(const Eigen::VectorXd& u, Eigen::VectorXd& fvec) const {
    ++evaluations;
    const auto p = natural(u);
    for (std::size_t i = 0; i < x.size(); ++i) fvec[i] = value_and_gradient(model, p, x[i], nullptr) - y[i];
    return 0;
  }

  int df(const Eigen::VectorXd& u, Eigen::MatrixXd& jac) const {
    const auto p = natural(u);
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      value_and_gradient(model, p, x[i], g.data());
      for (std::size_t k = 0; k < p.size(); ++k) jac(i, k) = logp[k] ? g[k] * p[k] : g[k];
    }
    return 0;
  }
};

double rss(Model m, std::span<const double> p, std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = value_and_gradient(m, p, x[i], nullptr) - y[i];
    s += r * r;
  }
  return s;
}

// Periodogram peak of the mean-subtracted data; works on non-uniform grids.
double estimate_frequency(std::span<const double> x, std::span<const double> y) {
  const double span = x.back() - x.front();
  double min_dx = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) min_dx = std::min(min_dx, x[i] - x[i - 1]);
  const double f_max = 0.5 / min_dx;
  const double df = 1.0 / (16.0 * span);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  auto power = [&](double f) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (y[i] - mean) * std::polar(1.0, -kTwoPi * f * x[i]);
    return std::norm(acc);
  };
  double best_f = 1.0 / span, best_p = -1.0;
  for (double f = 0.5 / span; f <= f_max; f += df) {
    const double p = power(f);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  // Parabolic refinement around the peak.
  const double pm = power(best_f - df), pp = power(best_f + df);
  const double denom = pm - 2.0 * best_p + pp;
  if (denom < 0.0) best_f += 0.5 * df * (pm - pp) / denom;
  return best_f;
}

// Linear least squares for y ~ c env cos(w x) + s env sin(w x) + b.
std::vector<double> phase_start(std::span<const double> x, std::span<const double> y, double f, double T,
                                bool gaussian) {
  Eigen::MatrixXd M(x.size(), 3);
  Eigen::VectorXd Y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double env = gaussian ? std::exp(-(x[i] / T) * (x[i] / T)) : 1.0;
    M(i, 0) = env * std::cos(kTwoPi * f * x[i]);
    M(i, 1) = env * std::sin(kTwoPi * f * x[i]);
    M(i, 2) = 1.0;
    Y[i] = y[i];
  }
  const Eigen::Vector3d c = M.colPivHouseholderQr().solve(Y);
  const double a = std::hypot(c[0], c[1]);
  const double phi = std::atan2(-c[1], c[0]);
  if (gaussian) return {a, T, f, phi, c[2]};
  return {a, f, phi, c[2]};
}

// a exp(-x/T) + b starting point from a log-linear regression of y - b.
std::vector<double> decay_start(std::span<const double> x, std::span<const double> y, double b) {
  const double span = x.back() - x.front();
  const double y0 = y.front() - b;
  std::vector<double> xs, ls;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = (y[i] - b) / y0;
    if (v > 0.02) {
      xs.push_back(x[i]);
      ls.push_back(std::log(v));
    }
  }
  double T = span / 3.0, a = y0;
  if (xs.size() >= 2) {
    const auto line = fit_line(xs, ls);
    if (line.slope < 0.0) {
      T = -1.0 / line.slope;
      a = y0 * std::exp(line.intercept);
    }
  }
  if (!(T > 0.0) || !std::isfinite(T)) T = span / 3.0;
  if (a == 0.0) a = 1.0;
  return {a, T, b};
}

std::vector<std::vector<double>> starting_points(Model m, std::span<const double> x, std::span<const double> y,
                                                 const Options& opt) {
  if (opt.initial) return {*opt.initial};
  const double span = x.back() - x.front();
  std::vector<std::vector<double>> starts;
  switch (m) {
    case Model::Exponential:
      for (double b : {0.0, y.back()}) starts.push_back(decay_start(x, y, b));
      break;
    case Model::Stretched:
      for (double b : {0.0, y.back()}) {
        const auto e = decay_start(x, y, b);
        for (double n : {1.0, 2.0}) starts.push_back({e[0], e[1], n, e[2]});
      }
      break;
    case Model::GaussianSinusoid: {
      const double f = opt.frequency_hint.value_or(estimate_frequency(x, y));
      for (double T : {0.25 * span, 0.5 * span, span, 2.0 * span}) starts.push_back(phase_start(x, y, f, T, true));
      break;
    }
    case Model::Sinusoid: {
      const double f = opt.frequency_hint.value_or(estimate_frequency(x, y));
      starts.push_back(phase_start(x, y, f, 0.0, false));
      break;
    }
    case Model::SinSquaredHalfAngle: {
      double a = 0.0;
      for (double v : y) a = std::max(a, std::abs(v));
      starts.push_back({a > 0.0 ? a : 1.0});
      break;
    }
  }
  return starts;
}

bool converged_status(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  switch (s) {
    case RelativeReductionTooSmall:
    case RelativeErrorTooSmall:
    case RelativeErrorAndReductionTooSmall:
    case CosinusTooSmall:
    case FtolTooSmall:
    case XtolTooSmall:
    case GtolTooSmall:
      return true;
    default:
      return false;
  }
}

std::string status_text(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  switch (s) {
    case RelativeReductionTooSmall: return "relative reduction below tolerance";
    case RelativeErrorTooSmall: return "relative step below tolerance";
    case RelativeErrorAndReductionTooSmall: return "relative step and reduction below tolerance";
    case CosinusTooSmall: return "gradient orthogonal to residual";
    case TooManyFunctionEvaluation: return "evaluation budget exhausted";
    case FtolTooSmall: return "at machine precision (ftol)";
    case XtolTooSmall: return "at machine precision (xtol)";
    case GtolTooSmall: return "at machine precision (gtol)";
    case ImproperInputParameters: return "improper input parameters";
    default: return "stopped";
  }
}

}  // namespace

double evaluate(Model m, std::span<const double> params, double x) {
  if (params.size() != parameter_names(m).size()) throw std::invalid_argument("evaluate: wrong parameter count");
  return value_and_gradient(m, params, x, nullptr);
}

double Result::get(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return params[i];
  throw std::out_of_range("fit result has no parameter '" + std::string(name) + "'");
}

double Result::sigma(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return sigmas[i];
  throw std::out_of_range("fit result has no parameter '" + std::string(name) + "'");
}

Result fit_decay(std::span<const double> x, std::span<const double> y, Model model, const Options& options) {
  const auto names = parameter_names(model);
  const std::size_t p = names.size();
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y differ in length");
  if (x.size() < p + 4)
    throw std::invalid_argument("fit: " + std::string(model_name(model)) + " needs at least " +
                                std::to_string(p + 4) + " points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw std::invalid_argument("fit: non-finite data");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("fit: x must be strictly increasing");

  const auto logp = log_params(model);
  Result best;
  best.model = model;
  best.names = names;
  double best_rss = std::numeric_limits<double>::infinity();
  int total_evals = 0;

  for (auto start : starting_points(model, x, y, options)) {
    if (start.size() != p) throw std::invalid_argument("fit: initial guess has the wrong size");
    Eigen::VectorXd u(p);
    bool usable = true;
    for (std::size_t k = 0; k < p; ++k) {
      if (logp[k]) {
        if (!(start[k] > 0.0)) usable = false;
        u[k] = std::log(std::abs(start[k]) > 0.0 ? std::abs(start[k]) : 1.0);
      } else {
        u[k] = start[k];
      }
    }
    if (!usable && options.initial) throw std::invalid_argument("fit: initial T/n must be positive");

    Problem problem(model, x, y);
    Eigen::LevenbergMarquardt<Problem> lm(problem);
    lm.setFtol(options.tolerance);
    lm.setXtol(options.tolerance);
    lm.setGtol(0.0);
    lm.setMaxfev(options.max_evaluations);
    const auto status = lm.minimize(u);
    total_evals += problem.evaluations;

    const auto params = problem.natural(u);
    const double r = rss(model, params, x, y);
    if (!std::isfinite(r)) continue;
    const bool ok = converged_status(status);
    // Prefer converged fits; among equals the smaller residual wins.
    const bool better = (ok && !best.converged) || (ok == best.converged && r < best_rss);
    if (better) {
      best_rss = r;
      best.params = params;
      best.converged = ok;
      best.status = status_text(status);
    }
  }
  best.evaluations = total_evals;
  if (best.params.empty()) {
    best.params.assign(p, std::numeric_limits<double>::quiet_NaN());
    best.sigmas.assign(p, std::numeric_limits<double>::quiet_NaN());
    best.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    best.residual_norm = std::numeric_limits<double>::quiet_NaN();
    best.status = "no finite iterate";
    return best;
  }

  if (model == Model::GaussianSinusoid || model == Model::Sinusoid) {
    // Canonical form: a > 0, phi in (-pi, pi].
    const std::size_t ia = 0, iphi = model == Model::Sinusoid ? 2 : 3;
    if (best.params[ia] < 0.0) {
      best.params[ia] = -best.params[ia];
      best.params[iphi] += units::kPi;
    }
    best.params[iphi] = std::remainder(best.params[iphi], units::kTwoPi);
  }

  best.residual_norm = std::sqrt(best_rss);
  Eigen::MatrixXd J(x.size(), p);
  std::vector<double> g(p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    value_and_gradient(model, best.params, x[i], g.data());
    for (std::size_t k = 0; k < p; ++k) J(i, k) = g[k];
  }
  const double dof = static_cast<double>(x.size() - p);
  const Eigen::MatrixXd JtJ = J.transpose() * J;
  best.covariance = JtJ.completeOrthogonalDecomposition().pseudoInverse() * (best_rss / dof);
  best.sigmas.resize(p);
  for (std::size_t k = 0; k < p; ++k) best.sigmas[k] = std::sqrt(std::max(0.0, best.covariance(k, k)));
  return best;
}

Result fit_decay(const SignalTrace& trace, Model model, const Options& options) {
  return fit_decay(trace.x, trace.y, model, options);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - out.intercept - out.slope * x[i];
      ss += r * r;
    }
    const double s2 = ss / (n - 2.0);
    out.slope_sigma = std::sqrt(s2 / sxx);
    out.intercept_sigma = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return out;
}

}  // namespace donorqed::fit
