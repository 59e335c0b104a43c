#pragma once

#include "donorqed/constants.hpp"
#include "donorqed/parallel.hpp"

#include <cstdint>
#include <vector>

namespace donorqed::coherence {

/// Detuning noise acting on the qubit: a quasi-static Gaussian offset plus a
/// one-sided power-law spectrum S(w) = S0 w^-alpha between the cutoffs, with
/// the normalisation <delta^2> = integral of S(w) dw over the band.
struct NoiseModel {
  double sigma_qs = 0.0;                       // rad/s
  double alpha = 1.0;
  double S0 = 0.0;                             // (rad/s)^2 (rad/s)^(alpha-1)
  double omega_lo = units::kTwoPi * 1e-3;      // rad/s
  double omega_hi = units::kTwoPi * 1e3;       // rad/s
  int n_tones = 200;
  std::uint64_t seed = 1;

  bool has_spectrum() const { return S0 > 0.0 && n_tones > 0; }
  bool is_silent() const { return sigma_qs == 0.0 && !has_spectrum(); }
  double spectral_density(double omega) const;
  void validate() const;
};

/// T2* = sqrt(2) / sigma_qs for a Gaussian free-induction envelope.
inline double sigma_for_t2star(double t2star) { return 1.4142135623730951 / t2star; }
inline double t2star_for_sigma(double sigma) { return 1.4142135623730951 / sigma; }

struct Tone {
  double omega;      // rad/s
  double amplitude;  // rad/s
};

/// Log-spaced synthesis tones; amplitude sqrt(2 S(w_k) dw_k) so that a tone
/// with uniformly random phase carries variance S(w_k) dw_k.
std::vector<Tone> synthesis_tones(const NoiseModel& noise);

/// One trajectory's noise: a static offset plus random tone phases.
class NoiseRealization {
 public:
  NoiseRealization() = default;
  NoiseRealization(const std::vector<Tone>* tones, double static_offset, std::vector<double> phases);

  /// Draw trajectory `index` from (noise.seed, index).
  static NoiseRealization sample(const NoiseModel& noise, const std::vector<Tone>& tones, std::uint64_t index);
  /// Purely static detuning (used for deterministic phase averaging).
  static NoiseRealization constant(double detuning);

  double static_offset() const { return static_; }
  bool time_dependent() const { return tones_ != nullptr && !tones_->empty(); }

  /// Instantaneous detuning delta(t), rad/s.
  double detuning(double t) const;
  /// Accumulated phase: integral of delta from 0 to t, rad.
  double phase(double t) const;

 private:
  const std::vector<Tone>* tones_ = nullptr;
  double static_ = 0.0;
  std::vector<double> phases_;
};

}  // namespace donorqed::coherence
