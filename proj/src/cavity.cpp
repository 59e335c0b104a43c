#include "donorqed/cavity.hpp"

#include "donorqed/io.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace donorqed::cavity {

using C = PhysicalConstants;
using cd = std::complex<double>;

double CavityMode::omega_c() const { return units::kTwoPi * C::c / lambda0; }
double CavityMode::kappa() const { return omega_c() / Q; }
double CavityMode::kappa_ext() const { return kappa_ext_fraction * kappa(); }
double CavityMode::volume() const {
  const double l = lambda0 / n;
  return V_rel * l * l * l;
}

void CavityMode::validate() const {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw std::invalid_argument("cavity: lambda0 must be positive");
  if (!(Q > 0.0) || !std::isfinite(Q)) throw std::invalid_argument("cavity: Q must be positive");
  if (!(kappa_ext_fraction > 0.0 && kappa_ext_fraction <= 0.5))
    throw std::invalid_argument("cavity: kappa_ext_fraction must lie in (0, 0.5] for a two-port cavity");
  if (!(V_rel > 0.0)) throw std::invalid_argument("cavity: V_rel must be positive");
  if (!(n > 0.0)) throw std::invalid_argument("cavity: refractive index must be positive");
}

void Emitter::validate() const {
  if (!(d_debye >= 0.0)) throw std::invalid_argument("emitter: dipole must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("emitter: gamma must be positive");
  if (!(omega_a > 0.0)) throw std::invalid_argument("emitter: omega_a must be positive");
}

double coupling_strength(double d_debye, double lambda0, double n, double V_rel) {
  if (!(d_debye >= 0.0) || !(lambda0 > 0.0) || !(n > 0.0) || !(V_rel > 0.0))
    throw std::invalid_argument("coupling_strength: arguments must be positive");
  const double w = units::kTwoPi * C::c / lambda0;
  const double l = lambda0 / n;
  const double V = V_rel * l * l * l;
  const double field = std::sqrt(C::hbar * w / (2.0 * C::eps0 * n * n * V));
  return d_debye * C::debye * field / C::hbar;
}

StrongCoupling strong_coupling_check(double g, double kappa, double gamma) {
  if (!(g >= 0.0) || !(kappa >= 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("strong_coupling_check: rates must be >= 0");
  StrongCoupling s;
  s.cooperativity = (kappa > 0.0 && gamma > 0.0) ? 4.0 * g * g / (kappa * gamma) : std::numeric_limits<double>::infinity();
  if (g == 0.0) s.cooperativity = 0.0;
  s.ratio = gamma > 0.0 ? 2.0 * g / gamma : std::numeric_limits<double>::infinity();
  s.strong = g > std::abs(kappa - gamma) / 4.0 && 2.0 * g > 0.5 * (kappa + gamma);
  return s;
}

const char* branch_name(SpinBranch s) { return s == SpinBranch::Down ? "down" : "up"; }

CoupledSystem CoupledSystem::make(const CavityMode& cavity, const Emitter& emitter, double B, double delta_tune,
                                  LambdaLeg leg, SpinBranch coupled) {
  cavity.validate();
  emitter.validate();
  CoupledSystem s;
  s.cavity = cavity;
  s.emitter = emitter;
  s.B = B;
  s.delta_tune = delta_tune;
  s.leg = leg;
  s.coupled_spin = coupled;
  s.g = coupling_strength(emitter.d_debye, cavity.lambda0, cavity.n, cavity.V_rel);
  return s;
}

double CoupledSystem::zeeman_offset(SpinBranch spin) const {
  const double m_ground = spin == SpinBranch::Down ? -0.5 : 0.5;
  const double m_excited = leg == LambdaLeg::SpinFlip ? -m_ground : m_ground;
  const double larmor = C::mu_B * B / C::hbar;
  return (emitter.g_excited * m_excited - emitter.g_ground * m_ground) * larmor;
}

double CoupledSystem::emitter_frequency(SpinBranch spin) const {
  return emitter.omega_a + zeeman_offset(spin) + delta_tune;
}

double CoupledSystem::detuning(SpinBranch spin) const { return emitter_frequency(spin) - cavity.omega_c(); }

double CoupledSystem::retune_for(SpinBranch spin) const {
  return cavity.omega_c() - emitter.omega_a - zeeman_offset(spin);
}

void CoupledSystem::validate() const {
  cavity.validate();
  emitter.validate();
  if (!std::isfinite(B) || !std::isfinite(delta_tune)) throw std::invalid_argument("coupled system: non-finite B or tuning");
  if (!(g >= 0.0)) throw std::invalid_argument("coupled system: g must be >= 0");
}

std::vector<Manifold> jc_manifolds(double omega_c, double g, double detuning, int n_max) {
  if (n_max < 1) throw std::invalid_argument("jc_ladder: n_max must be >= 1");
  std::vector<Manifold> out;
  for (int k = 1; k <= n_max; ++k) {
    const double centre = k * omega_c + 0.5 * detuning;
    const double half = std::sqrt(k * g * g + 0.25 * detuning * detuning);
    out.push_back({k, centre - half, centre + half});
  }
  return out;
}

std::vector<Ladder> jc_ladder(const CoupledSystem& system, int n_max) {
  system.validate();
  std::vector<Ladder> out;
  for (auto spin : {SpinBranch::Down, SpinBranch::Up}) {
    Ladder l;
    l.spin = spin;
    l.detuning = system.detuning(spin);
    l.manifolds = jc_manifolds(system.cavity.omega_c(), system.g, l.detuning, n_max);
    out.push_back(std::move(l));
  }
  return out;
}

cd transmission_amplitude(const CavityMode& cavity, double omega, double g_eff, double omega_a, double gamma) {
  const cd i(0.0, 1.0);
  cd denom = i * (cavity.omega_c() - omega) + 0.5 * cavity.kappa();
  if (g_eff != 0.0) denom += g_eff * g_eff / (i * (omega_a - omega) + 0.5 * gamma);
  return cavity.kappa_ext() / denom;
}

void CavitySpectrum::write_csv(std::ostream& os) const {
  os << "omega_Hz,T,R\n";
  for (std::size_t i = 0; i < omega.size(); ++i)
    os << io::format_double(units::angular_to_hz(omega[i])) << ',' << io::format_double(T[i]) << ','
       << io::format_double(R[i]) << '\n';
}

CavitySpectrum transmission_spectrum(const CoupledSystem& system, SpinState spin, std::span<const double> omega_grid,
                                     UncoupledModel uncoupled) {
  system.validate();
  for (std::size_t i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid[i] > omega_grid[i - 1])) throw std::invalid_argument("transmission: grid must be strictly increasing");

  double g_eff = system.g;
  double omega_a = system.emitter_frequency(system.coupled_spin);
  if (spin == SpinState::Uncoupled) {
    if (uncoupled == UncoupledModel::ZeroCoupling) g_eff = 0.0;
    else omega_a = system.emitter_frequency(system.uncoupled_spin());
  }

  CavitySpectrum s;
  s.omega.assign(omega_grid.begin(), omega_grid.end());
  for (double w : omega_grid) {
    const cd t = transmission_amplitude(system.cavity, w, g_eff, omega_a, system.emitter.gamma);
    const cd r = 1.0 - t;
    s.T.push_back(std::norm(t));
    s.R.push_back(std::norm(r));
  }
  return s;
}

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double min_height) {
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]) || y[i] < min_height) continue;
    // Parabola through the three samples (uniform spacing assumed locally).
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double shift = 0.0;
    if (denom < 0.0) shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
    const double h = 0.5 * (x[i + 1] - x[i - 1]);
    peaks.push_back({x[i] + shift * h, y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift});
  }
  return peaks;
}

double full_width_half_max(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm: need >= 3 paired samples");
  const auto it = std::max_element(y.begin(), y.end());
  const std::size_t ip = static_cast<std::size_t>(it - y.begin());
  const double half = 0.5 * *it;
  std::size_t l = ip, r = ip;
  while (l > 0 && y[l] > half) --l;
  while (r + 1 < y.size() && y[r] > half) ++r;
  if (y[l] > half || y[r] > half) throw std::runtime_error("fwhm: half maximum not bracketed by the grid");
  const double xl = x[l] + (half - y[l]) * (x[l + 1] - x[l]) / (y[l + 1] - y[l]);
  const double xr = x[r - 1] + (half - y[r - 1]) * (x[r] - x[r - 1]) / (y[r] - y[r - 1]);
  return xr - xl;
}

ReadoutResult readout_fidelity(double T_on, double T_off, double M, double T1_spin, double window) {
  if (!(T_on >= 0.0 && T_on <= 1.0) || !(T_off >= 0.0 && T_off <= 1.0))
    throw std::invalid_argument("readout: transmissions must lie in [0, 1]");
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("readout: mean photon number must be positive");
  if (!(window >= 0.0) || !(T1_spin > 0.0)) throw std::invalid_argument("readout: window >= 0 and T1 > 0 required");

  ReadoutResult r;
  r.T_on = T_on;
  r.T_off = T_off;
  r.M = M;
  r.flip_penalty = std::isfinite(T1_spin) ? window / (2.0 * T1_spin) : 0.0;
  if (T_on == T_off) {
    r.fidelity = 0.5;
    r.error_bright = 0.0;
    r.error_dark = 1.0;
    return r;
  }

  const double bright = M * std::max(T_on, T_off);
  const double dark = M * std::min(T_on, T_off);
  // Threshold 0 reads everything as bright.
  long best_k = 0;
  double best_bright = 0.0, best_dark = 1.0;
  const long k_max = static_cast<long>(std::ceil(bright + 20.0 * std::sqrt(bright) + 20.0));
  for (long k = 1; k <= k_max; ++k) {
    const double a = static_cast<double>(k);
    // P(N <= k-1 | mean) = Q(k, mean); P(N >= k | mean) = P(k, mean).
    const double e_bright = boost::math::gamma_q(a, bright);
    const double e_dark = dark > 0.0 ? boost::math::gamma_p(a, dark) : 0.0;
    if (e_bright + e_dark < best_bright + best_dark) {
      best_k = k;
      best_bright = e_bright;
      best_dark = e_dark;
    }
  }
  r.threshold = best_k;
  r.error_bright = best_bright;
  r.error_dark = best_dark;
  r.fidelity = std::clamp(1.0 - 0.5 * (best_bright + best_dark) - r.flip_penalty, 0.0, 1.0);
  return r;
}

double StragglePlacement::relative_coupling(double z) const {
  const double a = units::kPi / (2.0 * mode_halfwidth);
  if (profile == ModeProfile::Cosine) return std::cos(a * z);
  // Gaussian with the same curvature at the antinode.
  return std::exp(-0.5 * a * a * z * z);
}

void StragglePlacement::validate() const {
  if (!(sigma_depth >= 0.0) || !std::isfinite(sigma_depth)) throw std::invalid_argument("straggle: sigma_depth must be >= 0");
  if (!(mode_halfwidth > 0.0)) throw std::invalid_argument("straggle: mode_halfwidth must be positive");
}

CouplingStats coupling_variation(const StragglePlacement& placement, std::size_t n_samples, std::uint64_t seed,
                                 Exec exec) {
  placement.validate();
  if (n_samples < 1000) throw std::invalid_argument("coupling_variation: need at least 1000 samples");
  std::vector<double> g(n_samples);
  for_each_index(n_samples, exec, [&](std::size_t i) {
    auto rng = substream(seed, i);
    g[i] = placement.relative_coupling(placement.sigma_depth * rng.normal());
  });

  CouplingStats s;
  s.samples = n_samples;
  const double n = static_cast<double>(n_samples);
  for (double v : g) s.mean += v;
  s.mean /= n;
  double ss = 0.0;
  for (double v : g) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / (n - 1.0));
  s.rel_std = s.std / s.mean;
  s.mean_stderror = s.std / std::sqrt(n);
  return s;
}

}  // namespace donorqed::cavity
