#include "donorqed/coherence/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace donorqed::coherence {

double NoiseModel::spectral_density(double omega) const {
  if (omega < omega_lo || omega > omega_hi) return 0.0;
  return S0 * std::pow(omega, -alpha);
}

void NoiseModel::validate() const {
  if (!std::isfinite(sigma_qs) || sigma_qs < 0.0) throw std::invalid_argument("noise: sigma_qs must be finite and >= 0");
  if (!(alpha >= 0.0 && alpha <= 2.0)) throw std::invalid_argument("noise: alpha must lie in [0, 2]");
  if (!std::isfinite(S0) || S0 < 0.0) throw std::invalid_argument("noise: S0 must be finite and >= 0");
  if (!(omega_lo > 0.0 && omega_lo < omega_hi && std::isfinite(omega_hi)))
    throw std::invalid_argument("noise: need 0 < omega_lo < omega_hi");
  if (n_tones < 0) throw std::invalid_argument("noise: n_tones must be >= 0");
}

std::vector<Tone> synthesis_tones(const NoiseModel& noise) {
  noise.validate();
  std::vector<Tone> tones;
  if (!noise.has_spectrum()) return tones;
  const int n = noise.n_tones;
  const double log_lo = std::log(noise.omega_lo), log_hi = std::log(noise.omega_hi);
  const double dlog = n > 1 ? (log_hi - log_lo) / (n - 1) : (log_hi - log_lo);
  tones.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double w = std::exp(n > 1 ? log_lo + dlog * k : 0.5 * (log_lo + log_hi));
    // Bin edges at the geometric midpoints between neighbouring tones.
    const double dw = w * (std::exp(0.5 * dlog) - std::exp(-0.5 * dlog));
    tones.push_back({w, std::sqrt(2.0 * noise.S0 * std::pow(w, -noise.alpha) * dw)});
  }
  return tones;
}

NoiseRealization::NoiseRealization(const std::vector<Tone>* tones, double static_offset, std::vector<double> phases)
    : tones_(tones), static_(static_offset), phases_(std::move(phases)) {
  if (tones_ != nullptr && tones_->size() != phases_.size())
    throw std::invalid_argument("noise realization: phase count does not match tones");
}

NoiseRealization NoiseRealization::sample(const NoiseModel& noise, const std::vector<Tone>& tones,
                                          std::uint64_t index) {
  auto rng = substream(noise.seed, index);
  const double offset = noise.sigma_qs > 0.0 ? noise.sigma_qs * rng.normal() : 0.0;
  std::vector<double> phases(tones.size());
  for (auto& p : phases) p = units::kTwoPi * rng.uniform();
  return NoiseRealization(tones.empty() ? nullptr : &tones, offset, std::move(phases));
}

NoiseRealization NoiseRealization::constant(double detuning) { return NoiseRealization(nullptr, detuning, {}); }

double NoiseRealization::detuning(double t) const {
  double d = static_;
  if (tones_ != nullptr)
    for (std::size_t k = 0; k < tones_->size(); ++k) {
      const auto& tone = (*tones_)[k];
      d += tone.amplitude * std::cos(tone.omega * t + phases_[k]);
    }
  return d;
}

double NoiseRealization::phase(double t) const {
  double p = static_ * t;
  if (tones_ != nullptr)
    for (std::size_t k = 0; k < tones_->size(); ++k) {
      const auto& tone = (*tones_)[k];
      p += tone.amplitude / tone.omega * (std::sin(tone.omega * t + phases_[k]) - std::sin(phases_[k]));
    }
  return p;
}

}  // namespace donorqed::coherence
