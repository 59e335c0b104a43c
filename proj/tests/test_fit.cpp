#include "doctest.h"

#include "donorqed/fit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace donorqed;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("exact exponential data recover T to 1e-6") {
  const auto x = grid(0.1, 8.0, 40);
  std::vector<double> y;
  for (double v : x) y.push_back(0.97 * std::exp(-v / 2.14) + 0.01);
  const auto r = fit::fit_decay(x, y, fit::Model::Exponential);
  REQUIRE(r.converged);
  CHECK(r.get("T") == doctest::Approx(2.14).epsilon(1e-6));
  CHECK(r.get("a") == doctest::Approx(0.97).epsilon(1e-6));
  CHECK(r.get("b") == doctest::Approx(0.01).epsilon(1e-6).scale(1.0));
  CHECK(r.residual_norm < 1e-9);
}

TEST_CASE("stretched model recovers the exponent") {
  const auto x = grid(0.05, 5.0, 50);
  std::vector<double> y;
  for (double v : x) y.push_back(std::exp(-std::pow(v / 1.3, 2.4)));
  const auto r = fit::fit_decay(x, y, fit::Model::Stretched);
  REQUIRE(r.converged);
  CHECK(r.get("T") == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(r.get("n") == doctest::Approx(2.4).epsilon(1e-6));
}

TEST_CASE("sin^2 half-angle amplitude to 1e-9") {
  const auto x = grid(0.0, 2 * std::numbers::pi, 33);
  std::vector<double> y;
  for (double v : x) y.push_back(0.83 * std::pow(std::sin(v / 2), 2));
  const auto r = fit::fit_decay(x, y, fit::Model::SinSquaredHalfAngle);
  CHECK(r.get("a") == doctest::Approx(0.83).epsilon(1e-9));
}

TEST_CASE("Gaussian sinusoid with a frequency hint") {
  const auto x = grid(0.0, 3e-3, 61);
  std::vector<double> y;
  for (double v : x) y.push_back(std::exp(-std::pow(v / 1e-3, 2)) * std::cos(2 * std::numbers::pi * 2000 * v));
  fit::Options opt;
  opt.frequency_hint = 2000.0;
  const auto r = fit::fit_decay(x, y, fit::Model::GaussianSinusoid, opt);
  CHECK(r.get("T") == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(r.get("f") == doctest::Approx(2000.0).epsilon(1e-6));
}

TEST_CASE("fits are deterministic") {
  const auto x = grid(0.1, 8.0, 30);
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(std::exp(-x[i] / 2.0) + 0.01 * std::sin(7.0 * i));
  const auto a = fit::fit_decay(x, y, fit::Model::Stretched);
  const auto b = fit::fit_decay(x, y, fit::Model::Stretched);
  CHECK(a.params == b.params);
  CHECK(a.sigmas == b.sigmas);
  CHECK(a.get("T") > 0.0);
  CHECK(a.sigma("T") > 0.0);
}

TEST_CASE("fit input errors") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6}, y{1, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(fit::fit_decay(x, y, fit::Model::GaussianSinusoid), std::invalid_argument);
  const std::vector<double> xs{1, 2, 2, 4, 5, 6, 7, 8}, ys(8, 1.0);
  CHECK_THROWS_AS(fit::fit_decay(xs, ys, fit::Model::Exponential), std::invalid_argument);
  CHECK_THROWS_AS(fit::parse_model("cubic"), std::invalid_argument);
  CHECK(fit::parse_model("stretched") == fit::Model::Stretched);
  fit::Result r;
  CHECK_THROWS_AS(r.get("T"), std::out_of_range);
}

TEST_CASE("line fit standard errors") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto l = fit::fit_line(x, y);
  CHECK(l.slope == doctest::Approx(2.0));
  CHECK(l.intercept == doctest::Approx(1.0));
  CHECK(l.slope_sigma == doctest::Approx(0.0).scale(1.0));
}
