#include "donorqed/spin.hpp"

#include "donorqed/constants.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace donorqed;
using namespace donorqed::spin;

namespace {

// Closed-form Breit-Rabi levels for S = I = 1/2 (Hz): T+, T-, and the two m_F = 0 states.
struct BreitRabi {
  double t_plus, t_minus, upper0, lower0;
};

BreitRabi breit_rabi(const SpinSystem& s, double B) {
  const double ge = s.electron_gyro() * B, gn = s.nuclear_gyro() * B, A = s.A;
  const double root = 0.5 * std::sqrt(A * A + (ge + gn) * (ge + gn));
  return {0.25 * A + 0.5 * (ge - gn), 0.25 * A - 0.5 * (ge - gn), -0.25 * A + root, -0.25 * A - root};
}

double freq(const SpinSystem& s, double B, const std::string& a, const std::string& b) {
  const TransitionPair p{a, b};
  return transition_frequencies(s, B, std::span(&p, 1)).at(0).frequency;
}

}  // namespace

TEST_CASE("constants pinned to CODATA-2018") {
  CHECK(PhysicalConstants::mu_B / PhysicalConstants::h == doctest::Approx(13.9962449e9).epsilon(1e-8));
  CHECK(PhysicalConstants::hbar * 2.0 * units::kPi == doctest::Approx(PhysicalConstants::h).epsilon(1e-15));
  CHECK(units::inverse_cm_to_hz(1.0) == doctest::Approx(29.9792458e9).epsilon(1e-15));
}

TEST_CASE("zero-field spectrum of 77Se") {
  const auto s = selenium77();
  const auto H = build_hamiltonian(s, 0.0);
  CHECK(std::abs(H.trace()) < 1e-6);
  const auto es = eigensystem(s, 0.0);
  CHECK(es.energies(0) == doctest::Approx(-1.245e9).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) CHECK(es.energies(k) == doctest::Approx(0.415e9).epsilon(1e-12));
  CHECK(es.labels.at(0) == "S0");
  std::vector<std::string> sorted = es.labels;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::string>{"S0", "T+", "T-", "T0"});
  CHECK(freq(s, 0.0, "S0", "T0") == doctest::Approx(1.66e9).epsilon(1e-15));
}

TEST_CASE("zero-field F manifolds for I = 3/2") {
  const auto s = preset("33S");
  const auto es = eigensystem(s, 0.0);
  REQUIRE(es.energies.size() == 8);
  // F = I - 1/2 at -(I+1)A/2 (x3), F = I + 1/2 at +IA/2 (x5).
  for (int k = 0; k < 3; ++k) CHECK(es.energies(k) == doctest::Approx(-1.25 * s.A).epsilon(1e-12));
  for (int k = 3; k < 8; ++k) CHECK(es.energies(k) == doctest::Approx(0.75 * s.A).epsilon(1e-12));
  CHECK(es.find("F1m0") >= 0);
  CHECK(es.find("F2m-2") >= 0);
}

TEST_CASE("Breit-Rabi closed form against dense diagonalisation") {
  const auto s = selenium77();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double B = u(rng);
    const auto br = breit_rabi(s, B);
    std::vector<double> expect{br.t_plus, br.t_minus, br.upper0, br.lower0};
    std::sort(expect.begin(), expect.end());
    const auto es = eigensystem(s, B);
    for (int k = 0; k < 4; ++k) CHECK(es.energies(k) == doctest::Approx(expect[k]).epsilon(1e-12).scale(1e9));
  }
}

TEST_CASE("brute-force real 4x4 oracle at 70 uT") {
  const auto s = selenium77();
  const double B = 70e-6;
  const double ge = s.electron_gyro() * B, gn = s.nuclear_gyro() * B, A = s.A;
  Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
  H(0, 0) = 0.5 * ge - 0.5 * gn + 0.25 * A;
  H(1, 1) = 0.5 * ge + 0.5 * gn - 0.25 * A;
  H(2, 2) = -0.5 * ge - 0.5 * gn - 0.25 * A;
  H(3, 3) = -0.5 * ge + 0.5 * gn + 0.25 * A;
  H(1, 2) = H(2, 1) = 0.5 * A;
  const Eigen::Vector4d e = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(H).eigenvalues();
  const double lo = freq(s, B, "S0", "T-"), mid = freq(s, B, "S0", "T0"), hi = freq(s, B, "S0", "T+");
  CHECK(lo == doctest::Approx(e(1) - e(0)).epsilon(1e-12));
  CHECK(mid == doctest::Approx(e(2) - e(0)).epsilon(1e-12));
  CHECK(hi == doctest::Approx(e(3) - e(0)).epsilon(1e-12));
  CHECK((mid - lo) == doctest::Approx(0.98e6).epsilon(0.01));
  CHECK((hi - mid) == doctest::Approx(0.98e6).epsilon(0.01));
  // S0 <-> T0 shift from A: A (sqrt(1 + x^2) - 1) ~ 1.2 kHz.
  const double x = (s.electron_gyro() + s.nuclear_gyro()) * B / A;
  CHECK((mid - A) == doctest::Approx(A * (std::sqrt(1.0 + x * x) - 1.0)).epsilon(1e-4));
  CHECK((mid - A) == doctest::Approx(1.2e3).epsilon(0.05));
}

TEST_CASE("build_hamiltonian rejects non-finite input") {
  CHECK_THROWS_AS(build_hamiltonian(selenium77(), std::nan("")), std::invalid_argument);
  auto s = selenium77();
  s.A = INFINITY;
  CHECK_THROWS_AS(build_hamiltonian(s, 0.0), std::invalid_argument);
  s = selenium77();
  s.I = 0.7;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("property: Hermiticity, real spectrum, traceless, unitarity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 120; ++i) {
    SpinSystem s;
    s.I = 0.5 * (1 + static_cast<int>(u(rng) * 4));  // 1/2 .. 2
    s.A = (u(rng) - 0.5) * 8e9;
    s.g_n = (u(rng) - 0.5) * 6.0;
    s.g_e = 1.5 + u(rng);
    const double B = (u(rng) - 0.5) * 20.0;
    const auto H = build_hamiltonian(s, B);
    const double scale = H.cwiseAbs().maxCoeff();
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(std::abs(H.trace()) < 1.0);
    const auto es = eigensystem(s, B);
    const auto n = es.states.cols();
    CHECK((es.states.adjoint() * es.states - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(es.energies.sum()) < 1.0);
    for (Eigen::Index k = 1; k < n; ++k) CHECK(es.energies(k) >= es.energies(k - 1));
    // Residual |H v - E v| confirms each pair.
    for (Eigen::Index k = 0; k < n; ++k)
      CHECK((H * es.states.col(k) - es.energies(k) * es.states.col(k)).norm() < 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("high-field labels follow product states") {
  const auto s = selenium77();
  const auto es = eigensystem(s, 2.0);
  for (double w : es.product_weight) CHECK(w > 0.99);
  CHECK(es.product_labels.at(es.index_of("T+")) == "|↑⇑⟩");
  CHECK(es.product_labels.at(es.index_of("T-")) == "|↓⇓⟩");
  CHECK(es.labels.back() == "T+");
}

TEST_CASE("eigenvalue continuity over 1 uT steps") {
  const auto s = selenium77();
  const double dB = 1e-6;
  const double bound = (s.electron_gyro() + std::abs(s.nuclear_gyro())) * dB + 1.0;
  auto prev = eigensystem(s, 0.0);
  for (int i = 1; i <= 300; ++i) {
    const auto cur = continue_eigensystem(s, prev, i * dB, dB);
    for (const auto& l : cur.labels)
      CHECK(std::abs(cur.energies(cur.index_of(l)) - prev.energies(prev.index_of(l))) <= bound);
    prev = cur;
  }
}

TEST_CASE("label continuation is involutive") {
  for (const char* name : {"77Se", "33S", "125Te"}) {
    const auto s = preset(name);
    const auto zero = zero_field_eigensystem(s);
    const auto far = continue_eigensystem(s, zero, 2.5, 0.025);
    const auto back = continue_eigensystem(s, far, 0.0, 0.025);
    CHECK(back.labels == zero.labels);
    // Stopping just short of zero: labels sit on the same energies as the forward sweep.
    const auto near_fwd = eigensystem(s, 1e-4);
    const auto near_back = continue_eigensystem(s, far, 1e-4, 0.025);
    for (const auto& l : near_fwd.labels)
      CHECK(near_back.energies(near_back.index_of(l)) == doctest::Approx(near_fwd.energies(near_fwd.index_of(l))));
  }
}

TEST_CASE("pair parsing with dashes in labels") {
  const auto s = selenium77();
  CHECK(parse_pair("S0-T-", s) == TransitionPair{"S0", "T-"});
  CHECK(parse_pair("T--T+", s) == TransitionPair{"T-", "T+"});
  CHECK(parse_pairs("S0-T-,S0-T0", s).size() == 2);
  CHECK_THROWS_AS(parse_pair("S0-X", s), std::invalid_argument);
  CHECK_THROWS_AS(parse_pair("S0-S0", s), std::invalid_argument);
}

TEST_CASE("preset table") {
  CHECK(preset("33S").I == 1.5);
  CHECK(preset("123Te").A == 2.90e9);
  CHECK(preset("125Te").A == 3.50e9);
  try {
    preset("99Xx");
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("77Se") != std::string::npos);
  }
}

TEST_CASE("field sweep: linear S0-T+/- lines, even S0-T0, CSV header") {
  const auto s = selenium77();
  const std::vector<TransitionPair> pairs{{"S0", "T-"}, {"S0", "T0"}, {"S0", "T+"}};
  const auto t = field_sweep(s, 0.0, 200e-6, 201, pairs);
  REQUIRE(t.B.size() == 201);
  for (std::size_t i = 1; i < t.B.size(); ++i) CHECK(t.B[i] > t.B[i - 1]);
  for (int c : {0, 2}) {
    // Least-squares line; worst residual relative to the total excursion.
    const double n = static_cast<double>(t.B.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.B.size(); ++i) {
      const double x = t.B[i], y = t.frequencies[i][c];
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx), icpt = (sy - slope * sx) / n;
    double worst = 0.0;
    for (std::size_t i = 0; i < t.B.size(); ++i)
      worst = std::max(worst, std::abs(t.frequencies[i][c] - (icpt + slope * t.B[i])));
    const double excursion = std::abs(t.frequencies.back()[c] - t.frequencies.front()[c]);
    CHECK(worst <= 1e-3 * excursion);
  }
  for (double B : {10e-6, 70e-6, 200e-6})
    CHECK(freq(s, B, "S0", "T0") == doctest::Approx(freq(s, -B, "S0", "T0")).epsilon(1e-9));

  std::ostringstream os;
  t.write_csv(os);
  const auto text = os.str();
  CHECK(text.rfind("B_T,S0-T-_Hz,S0-T0_Hz,S0-T+_Hz\n0e+00,1.66e+09,", 0) == 0);
  CHECK_THROWS_AS(field_sweep(s, 0.0, 1e-4, 1, pairs), std::invalid_argument);
  CHECK_THROWS_AS(field_sweep(s, 1e-4, 0.0, 10, pairs), std::invalid_argument);
}

TEST_CASE("clock transitions") {
  const auto s = selenium77();
  const auto low = find_clock_transition(s, {"S0", "T0"}, 0.0, 1e-3);
  REQUIRE(low.size() == 1);
  CHECK(std::abs(low[0].B) < 1e-9);
  CHECK(low[0].d2 > 0.0);
  CHECK(low[0].f == doctest::Approx(1.66e9));

  const double ge = s.electron_gyro(), gn = s.nuclear_gyro();
  const double analytic = s.A * (ge - gn) / (2.0 * std::sqrt(ge * gn) * (ge + gn));
  for (const char* other : {"T+", "T-"}) {
    const TransitionPair p = std::string(other) == "T+" ? TransitionPair{"T0", "T+"} : TransitionPair{"S0", "T-"};
    const auto high = find_clock_transition(s, p, 0.5, 3.0);
    REQUIRE(high.size() == 1);
    CHECK(high[0].B == doctest::Approx(analytic).epsilon(1e-6));
    CHECK(high[0].B >= 1.5);
    CHECK(high[0].B <= 2.0);
    CHECK(std::abs(high[0].d1) < 1e6);
    CHECK(high[0].d2_step == doctest::Approx(1e-3 * high[0].B));
  }

  auto pure = selenium77();
  pure.A = 0.0;
  CHECK(find_clock_transition(pure, {"T0", "T+"}, 0.0, 2.0).empty());
  CHECK(find_clock_transition(pure, {"S0", "T+"}, -1.0, 2.0).empty());
}
