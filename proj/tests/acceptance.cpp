// Acceptance suite: one PASS/FAIL line per criterion, with its wall time.
// Exit status is the number of failed criteria (capped at 1 for ctest).

#include "donorqed/cavity.hpp"
#include "donorqed/coherence/experiments.hpp"
#include "donorqed/constants.hpp"
#include "donorqed/optics.hpp"
#include "donorqed/spin.hpp"


#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace donorqed;
using units::kPi;
using units::kTwoPi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

Outcome zero_field() {
  Outcome o;
  const auto sys = spin::selenium77();
  const spin::TransitionPair p{"S0", "T0"};
  const auto f = spin::transition_frequencies(sys, 0.0, std::span(&p, 1)).at(0).frequency;
  o.check(std::abs(f - 1.66e9) <= 1e-6, "f(S0-T0) = " + fmt("%.6f Hz", f));
  return o;
}

// Independent oracle: plain real 4x4 matrix built by hand, Eigen self-adjoint solver.
Eigen::Vector4d oracle_levels(double B) {
  const auto sys = spin::selenium77();
  const double ge = sys.electron_gyro() * B, gn = sys.nuclear_gyro() * B, A = sys.A;
  Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
  // |up,Up>, |up,Dn>, |dn,Up>, |dn,Dn>
  H(0, 0) = 0.5 * ge - 0.5 * gn + 0.25 * A;
  H(1, 1) = 0.5 * ge + 0.5 * gn - 0.25 * A;
  H(2, 2) = -0.5 * ge - 0.5 * gn - 0.25 * A;
  H(3, 3) = -0.5 * ge + 0.5 * gn + 0.25 * A;
  H(1, 2) = H(2, 1) = 0.5 * A;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(H).eigenvalues();
}

Outcome earth_field() {
  Outcome o;
  const auto sys = spin::selenium77();
  const double B = 70e-6;
  const std::vector<spin::TransitionPair> pairs{{"S0", "T-"}, {"S0", "T0"}, {"S0", "T+"}};
  const auto tr = spin::transition_frequencies(sys, B, pairs);
  const double lo = tr[0].frequency, mid = tr[1].frequency, hi = tr[2].frequency;

  const auto e = oracle_levels(B);  // ascending: S0, T-, T0, T+ at this field
  const double o_lo = e(1) - e(0), o_mid = e(2) - e(0), o_hi = e(3) - e(0);
  const double d_lo = lo - mid, d_hi = hi - mid;
  o.check(std::abs(d_lo - (o_lo - o_mid)) <= 0.01 * std::abs(o_lo - o_mid), "lower offset " + fmt("%.4f MHz", d_lo / 1e6));
  o.check(std::abs(d_hi - (o_hi - o_mid)) <= 0.01 * std::abs(o_hi - o_mid), "upper offset " + fmt("%+.4f MHz", d_hi / 1e6));
  o.check(std::abs(std::abs(d_lo) - 0.98e6) <= 0.01 * 0.98e6 && std::abs(d_hi - 0.98e6) <= 0.01 * 0.98e6, "|offsets| ~ 0.98 MHz");
  o.check(lo < mid && mid < hi, "three resolved lines");
  return o;
}

Outcome clock_points() {
  Outcome o;
  const auto sys = spin::selenium77();
  const auto low = spin::find_clock_transition(sys, {"S0", "T0"}, 0.0, 1e-3);
  const bool at_zero = low.size() == 1 && std::abs(low[0].B) < 1e-9 && low[0].d2 > 0.0;
  o.check(at_zero, "S0-T0 clock at B = 0, d2 > 0");
  // At high field the T0 <-> T+ pair is the nuclear-spin flip within the upper electron manifold.
  const auto high = spin::find_clock_transition(sys, {"T0", "T+"}, 0.5, 3.0);
  const bool found = high.size() == 1 && high[0].B >= 1.5 && high[0].B <= 2.0 && std::abs(high[0].d1) < 1e6;
  o.check(found, high.empty() ? std::string("no nuclear clock point") : "nuclear clock at " + fmt("%.4f T", high[0].B));
  return o;
}

Outcome coherence_suite() {
  Outcome o;
  coherence::QubitModel q;
  q.T2_intr = 2.14;

  // Hahn echo, quasi-static noise only.
  {
    coherence::NoiseModel noise;
    noise.sigma_qs = coherence::sigma_for_t2star(1e-3);
    noise.seed = 7;
    const auto taus = linspace(0.05, 4.0, 40);
    const auto r = coherence::hahn_echo_experiment(q, taus, noise, {}, {2000, Exec::Parallel});
    o.check(std::abs(r.T2 - 2.14) <= 0.05 * 2.14, "Hahn T2 " + fmt("%.4f s", r.T2));
  }
  // Ramsey envelope.
  {
    coherence::NoiseModel noise;
    noise.sigma_qs = coherence::sigma_for_t2star(1e-3);
    noise.seed = 11;
    const auto taus = linspace(0.0, 3e-3, 61);
    const auto tr = coherence::ramsey_experiment(q, 2000.0, taus, noise, {2000, Exec::Parallel});
    fit::Options opt;
    opt.frequency_hint = 2000.0;
    const auto f = fit::fit_decay(tr, fit::Model::GaussianSinusoid, opt);
    o.check(std::abs(f.get("T") - 1e-3) <= 0.05e-3, "Ramsey T2* " + fmt("%.4f ms", f.get("T") * 1e3));
  }
  // T1.
  {
    const double taus[] = {0.0, 360.0};
    const auto tr = coherence::t1_experiment(q, taus);
    o.check(std::abs(tr.y[1] - std::exp(-1.0)) <= 1e-6, "T1 y(T1) " + fmt("%.8f", tr.y[1]));
  }
  // CPMG with 1/f noise.
  {
    coherence::QubitModel qc;
    qc.T2_intr = 700.0;
    coherence::NoiseModel noise;
    noise.alpha = 1.0;
    noise.S0 = 0.63;
    noise.seed = 3;
    const int ns[] = {1, 2, 4, 8};
    std::vector<double> times;
    for (int i = 0; i < 40; ++i) times.push_back(0.1 * std::pow(100.0, i / 39.0));
    const auto r = coherence::cpmg_experiment(qc, ns, times, noise, {2000, Exec::Parallel});
    o.check(std::abs(r.exponent - 0.5) <= 0.1, "CPMG exponent " + fmt("%.3f", r.exponent));
  }
  return o;
}

Outcome hyperpolarization() {
  Outcome o;
  using namespace optics;
  PumpModel pump;
  pump.power = 4e-6;
  pump.rate_coeff = calibrate_rate_coeff(50e-3, 4e-6);
  o.check(std::abs(pump.time_constant() - 50e-3) <= 1e-15, "tau(4 uW) " + fmt("%.6g s", pump.time_constant()));
  PumpModel doubled = pump;
  doubled.power = 8e-6;
  o.check(std::abs(doubled.time_constant() - 25e-3) <= 1e-15, "tau(8 uW) " + fmt("%.6g s", doubled.time_constant()));
  const double t[] = {0.0, 10.0 * pump.time_constant()};
  const auto trace = hyperpolarize(pump, GroundPool::Triplet, t);
  o.check(trace.polarization(1) > 0.99, "polarization(10 tau) " + fmt("%.6f", trace.polarization(1)));
  return o;
}

Outcome optics_conversions() {
  Outcome o;
  using namespace optics;
  const double nu = linewidth_hz_from_cm1(0.007);
  o.check(std::abs(nu - 210e6) <= 0.005 * 210e6, "0.007 cm-1 = " + fmt("%.2f MHz", nu / 1e6));
  const double tau = lifetime_from_linewidth_hz(nu);
  o.check(std::abs(tau - 0.76e-9) <= 0.01e-9, "lifetime " + fmt("%.4f ns", tau * 1e9));
  const double trad = radiative_lifetime(1.3, 2.9e-6, 3.45);
  o.check(std::abs(trad - 13e-6) <= 0.1 * 13e-6, "tau_rad " + fmt("%.3f us", trad * 1e6));
  const double d = dipole_from_lifetime(13e-6, 2.9e-6, 3.45);
  o.check(std::abs(d - 1.3) <= 0.13, "d(13 us) " + fmt("%.4f D", d));
  return o;
}

Outcome cavity_numbers() {
  Outcome o;
  using namespace cavity;
  const double g = coupling_strength(1.3, 2.9e-6, 3.45, 0.1);
  const double two_g = 2.0 * g / kTwoPi;
  o.check(std::abs(two_g - 1e9) <= 0.1e9, "2g/2pi " + fmt("%.4f GHz", two_g / 1e9));
  const Emitter em;
  const auto nominal = strong_coupling_check(kTwoPi * 0.5e9, CavityMode{}.kappa(), em.gamma);
  o.check(std::abs(nominal.ratio - 4.8) <= 0.05, "2g/gamma (2g = 1 GHz) " + fmt("%.3f", nominal.ratio));
  const auto computed = strong_coupling_check(g, CavityMode{}.kappa(), em.gamma);
  o.check(computed.ratio >= 4.5 && computed.ratio <= 5.5, "2g/gamma (computed g) " + fmt("%.3f", computed.ratio));
  o.check(nominal.cooperativity > 1.0 && computed.cooperativity > 1.0,
          "cooperativity " + fmt("%.3f", computed.cooperativity) + " (nominal " + fmt("%.3f", nominal.cooperativity) + ")");
  return o;
}

Outcome spin_spectra() {
  Outcome o;
  using namespace cavity;
  // g well above kappa and gamma: Q = 1e6 and a narrow emitter.
  CavityMode mode;
  mode.Q = 1e6;
  Emitter em;
  em.gamma = kTwoPi * 20e6;
  auto sys = CoupledSystem::make(mode, em);
  sys.delta_tune = sys.retune_for(sys.coupled_spin);
  const double wc = mode.omega_c();
  std::vector<double> grid;
  const int n = 40001;
  for (int i = 0; i < n; ++i) grid.push_back(wc + kTwoPi * (-1.5e9 + 3e9 * i / (n - 1)));

  const auto coupled = transmission_spectrum(sys, SpinState::Coupled, grid);
  const auto peaks = find_peaks(coupled.omega, coupled.T, 0.05);
  bool doublet = peaks.size() == 2;
  double split = doublet ? peaks[1].omega - peaks[0].omega : 0.0;
  o.check(doublet && std::abs(split - 2.0 * sys.g) <= 0.02 * 2.0 * sys.g,
          "doublet split / 2g = " + fmt("%.5f", split / (2.0 * sys.g)));

  const auto bare = transmission_spectrum(sys, SpinState::Uncoupled, grid);
  const double w = full_width_half_max(bare.omega, bare.T);
  o.check(std::abs(w - mode.kappa()) <= 0.02 * mode.kappa(), "bare FWHM / kappa = " + fmt("%.5f", w / mode.kappa()));

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CavityMode m;
    m.Q = std::pow(10.0, 3.0 + 4.0 * u(rng));
    m.kappa_ext_fraction = 0.5 * (1e-3 + (1.0 - 1e-3) * u(rng));
    const double gg = m.kappa() * 10.0 * u(rng);
    const double gam = m.kappa() * std::pow(10.0, -2.0 + 3.0 * u(rng));
    const double wa = m.omega_c() + m.kappa() * (-5.0 + 10.0 * u(rng));
    const double w0 = m.omega_c() + m.kappa() * (-10.0 + 20.0 * u(rng));
    const auto t = transmission_amplitude(m, w0, gg, wa, gam);
    const double s = std::norm(t) + std::norm(1.0 - t);
    worst = std::max(worst, s);
    if (s > 1.0 + 1e-12) ++violations;
  }
  o.check(violations == 0, "passivity max |t|^2+|r|^2 = " + fmt("%.15f", worst));
  return o;
}

// Poisson tail sums by direct pmf accumulation in extended precision.
double oracle_fidelity(double T_on, double T_off, double M, long* threshold) {
  const long double hi = M * std::max(T_on, T_off), lo = M * std::min(T_on, T_off);
  const long kmax = static_cast<long>(hi + 40.0 * std::sqrt(hi) + 60.0);
  long double best = 2.0L;
  long double cdf_hi = 0.0L, cdf_lo = 0.0L;  // P(N <= k - 1)
  long double p_hi = std::exp(-hi), p_lo = std::exp(-lo);
  for (long k = 0; k <= kmax; ++k) {
    const long double err = cdf_hi + (1.0L - cdf_lo);
    if (err < best) {
      best = err;
      *threshold = k;
    }
    cdf_hi += p_hi;
    cdf_lo += p_lo;
    p_hi *= hi / (k + 1);
    p_lo *= lo / (k + 1);
  }
  return static_cast<double>(1.0L - 0.5L * best);
}

Outcome readout() {
  Outcome o;
  const auto r = cavity::readout_fidelity(0.01, 0.9, 100.0);
  long k_oracle = -1;
  const double f_oracle = oracle_fidelity(0.01, 0.9, 100.0, &k_oracle);
  o.check(r.fidelity > 0.999, "fidelity " + fmt("%.12f", r.fidelity));
  o.check(std::abs(r.fidelity - f_oracle) <= 1e-9 && r.threshold == k_oracle,
          "oracle diff " + fmt("%.2e", std::abs(r.fidelity - f_oracle)) + " threshold " + std::to_string(r.threshold));
  return o;
}

Outcome straggle() {
  Outcome o;
  cavity::StragglePlacement p;
  const auto s = cavity::coupling_variation(p, 100000, 42);
  o.check(s.rel_std < 0.10, "std/mean " + fmt("%.4f", s.rel_std));
  const double a = kPi / (2.0 * p.mode_halfwidth);
  const double expect = std::exp(-0.5 * a * a * p.sigma_depth * p.sigma_depth);
  o.check(std::abs(s.mean - expect) <= 3.0 * s.mean_stderror,
          "mean " + fmt("%.5f", s.mean) + " vs " + fmt("%.5f", expect) + " (SE " + fmt("%.1e", s.mean_stderror) + ")");
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int kInstances = 100;

  // Hermiticity and unitarity.
  int bad = 0;
  for (int i = 0; i < kInstances; ++i) {
    spin::SpinSystem s;
    s.I = 0.5 * std::floor(u(rng) * 4.0);  // 0, 1/2, 1, 3/2
    s.A = (u(rng) - 0.5) * 8e9;
    s.g_n = (u(rng) - 0.5) * 4.0;
    const double B = (u(rng) - 0.5) * 4.0;
    const auto H = spin::build_hamiltonian(s, B);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) ++bad;
    if (s.I > 0.0) {
      const auto es = spin::eigensystem(s, B);
      const auto n = es.states.cols();
      if ((es.states.adjoint() * es.states - spin::ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) ++bad;
    }
  }
  o.check(bad == 0, "hermiticity/unitarity failures " + std::to_string(bad));

  // Bloch norm for noiseless unitary sequences and noisy ensembles.
  bad = 0;
  for (int i = 0; i < kInstances; ++i) {
    coherence::QubitModel q;
    q.T1 = std::numeric_limits<double>::infinity();
    q.T2_intr = std::numeric_limits<double>::infinity();
    coherence::PulseSequence seq;
    seq.detuning = (u(rng) - 0.5) * 1e3;
    for (int k = 0; k < 4; ++k) seq.pulse(u(rng) * kTwoPi, u(rng) * kTwoPi).delay(u(rng) * 1e-3);
    const auto v = coherence::evolve_trajectory(q, seq, coherence::NoiseRealization::constant((u(rng) - 0.5) * 1e4));
    if (std::abs(v.norm() - 1.0) > 1e-12) ++bad;
    coherence::NoiseModel noise;
    noise.sigma_qs = u(rng) * 5e3;
    noise.seed = static_cast<std::uint64_t>(i);
    const auto e = coherence::evolve(coherence::QubitModel{}, seq, noise, 200, Exec::Serial);
    if (e.mean.norm() > 1.0 + 3.0 * e.stderror.norm()) ++bad;
  }
  o.check(bad == 0, "Bloch-norm failures " + std::to_string(bad));

  // Population conservation.
  bad = 0;
  for (int i = 0; i < kInstances; ++i) {
    optics::PumpModel pump;
    pump.power = u(rng) * 1e-5;
    pump.rate_coeff = 1e3 + u(rng) * 1e6;
    pump.branch_back = 0.9 * u(rng);
    const double s0 = u(rng);
    const auto times = linspace(0.0, 0.2, 50);
    const auto tr = optics::hyperpolarize(pump, u(rng) < 0.5 ? optics::GroundPool::Singlet : optics::GroundPool::Triplet,
                                          times, {s0, 1.0 - s0});
    for (const auto& st : tr.states)
      if (std::abs(st.singlet + st.triplet - 1.0) > 1e-12 || st.singlet < 0.0 || st.triplet < 0.0) ++bad;
  }
  o.check(bad == 0, "population failures " + std::to_string(bad));

  // JC sqrt(k) scaling at zero detuning.
  bad = 0;
  for (int i = 0; i < kInstances; ++i) {
    const double g = u(rng) * 1e10;
    const auto m = cavity::jc_manifolds(1e15, g, 0.0, 4);
    for (const auto& mk : m)
      if (std::abs(mk.splitting() - 2.0 * g * std::sqrt(static_cast<double>(mk.k))) > 1e-12 * 1e15) ++bad;
  }
  o.check(bad == 0, "JC sqrt(k) failures " + std::to_string(bad));

  // Determinism under seed, serial and parallel.
  bad = 0;
  for (int i = 0; i < kInstances; ++i) {
    coherence::NoiseModel noise;
    noise.sigma_qs = u(rng) * 1e3;
    noise.S0 = u(rng) < 0.5 ? u(rng) : 0.0;
    noise.n_tones = 20;
    noise.seed = static_cast<std::uint64_t>(rng());
    coherence::PulseSequence seq;
    seq.pulse(0.0, kPi / 2).delay(u(rng) * 1e-2).pulse(0.0, kPi).delay(u(rng) * 1e-2).pulse(0.0, kPi / 2);
    const coherence::QubitModel q;
    const auto a = coherence::evolve(q, seq, noise, 64, Exec::Parallel);
    const auto b = coherence::evolve(q, seq, noise, 64, Exec::Parallel);
    const auto c = coherence::evolve(q, seq, noise, 64, Exec::Serial);
    if (a.mean != b.mean || a.mean != c.mean || a.stderror != c.stderror) ++bad;
  }
  for (int i = 0; i < kInstances; ++i) {
    cavity::StragglePlacement p;
    p.sigma_depth = u(rng) * 200e-9;
    const auto seed = static_cast<std::uint64_t>(rng());
    const auto a = cavity::coupling_variation(p, 1000, seed, Exec::Parallel);
    const auto b = cavity::coupling_variation(p, 1000, seed, Exec::Serial);
    if (a.mean != b.mean || a.std != b.std) ++bad;
  }
  o.check(bad == 0, "determinism failures " + std::to_string(bad));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "zero-field splitting", 1.0, zero_field},
      {2, "earth-field resonance triplet", 1.0, earth_field},
      {3, "clock transitions", 5.0, clock_points},
      {4, "coherence suite", 120.0, coherence_suite},
      {5, "hyperpolarization", 1.0, hyperpolarization},
      {6, "optics conversions", 1.0, optics_conversions},
      {7, "cavity numbers", 1.0, cavity_numbers},
      {8, "spin-dependent spectra", 10.0, spin_spectra},
      {9, "readout fidelity", 1.0, readout},
      {10, "straggle statistics", 10.0, straggle},
      {11, "property suites", 120.0, properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.budget_s) o.check(false, "over time budget " + fmt("%.0f s", c.budget_s));
    if (!o.pass) ++failed;
    std::printf("%s %2d %-30s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, dt, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
