#pragma once

// Donor-cavity coupling: vacuum Rabi coupling from the dipole and mode
// volume, the spin-dependent Jaynes-Cummings ladder, input-output
// transmission spectra, photon-counting readout and implantation straggle.

#include "donorqed/constants.hpp"
#include "donorqed/parallel.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace donorqed::cavity {

inline constexpr double kDefaultWavelength = 2.9e-6;  // m

struct CavityMode {
  double lambda0 = kDefaultWavelength;  // vacuum wavelength, m
  double Q = 1e5;
  double kappa_ext_fraction = 0.5;      // per-port external rate / kappa, in (0, 1/2]
  double V_rel = 0.1;                   // mode volume in units of (lambda/n)^3
  double n = 3.45;

  double omega_c() const;    // rad/s
  double kappa() const;      // total energy decay rate omega_c / Q, rad/s
  double kappa_ext() const;  // rate into each access port, rad/s
  double volume() const;     // m^3
  void validate() const;
};

struct Emitter {
  double d_debye = 1.3;
  double omega_a = units::kTwoPi * PhysicalConstants::c / kDefaultWavelength;  // rad/s
  double gamma = units::kTwoPi * 0.007 * units::kHzPerInverseCm;               // FWHM, rad/s
  double g_ground = 2.0057;
  double g_excited = 0.644;

  void validate() const;
};

/// g = (d / hbar) sqrt(hbar w / (2 eps0 n^2 V)), V = V_rel (lambda/n)^3; rad/s.
double coupling_strength(double d_debye, double lambda0, double n, double V_rel);

struct StrongCoupling {
  bool strong = false;
  double cooperativity = 0.0;  // 4 g^2 / (kappa gamma)
  double ratio = 0.0;          // 2 g / gamma
};

/// Strong when g > |kappa - gamma| / 4 and the splitting 2g exceeds the mean
/// linewidth (kappa + gamma) / 2.
StrongCoupling strong_coupling_check(double g, double kappa, double gamma);

/// Ground electron spin projection.
enum class SpinBranch { Down, Up };
/// Which Lambda leg the cavity addresses: ground m -> excited -m or m -> m.
enum class LambdaLeg { SpinFlip, SpinConserving };

const char* branch_name(SpinBranch s);

struct CoupledSystem {
  CavityMode cavity;
  Emitter emitter;
  double B = 0.0;            // T
  double delta_tune = 0.0;   // excited-state tuning, rad/s
  double g = 0.0;            // rad/s
  LambdaLeg leg = LambdaLeg::SpinFlip;
  SpinBranch coupled_spin = SpinBranch::Down;

  /// g from the coupling formula and the cavity/emitter parameters.
  static CoupledSystem make(const CavityMode& cavity, const Emitter& emitter, double B = 0.0, double delta_tune = 0.0,
                            LambdaLeg leg = LambdaLeg::SpinFlip, SpinBranch coupled = SpinBranch::Down);

  /// Zeeman offset of the addressed leg for a ground spin, rad/s.
  double zeeman_offset(SpinBranch spin) const;
  /// omega_a + Zeeman offset + delta_tune.
  double emitter_frequency(SpinBranch spin) const;
  /// Emitter minus cavity frequency.
  double detuning(SpinBranch spin) const;
  /// delta_tune that puts `spin`'s leg on cavity resonance.
  double retune_for(SpinBranch spin) const;

  SpinBranch uncoupled_spin() const { return coupled_spin == SpinBranch::Down ? SpinBranch::Up : SpinBranch::Down; }
  void validate() const;
};

struct Manifold {
  int k = 0;              // excitation number
  double lower = 0.0;     // rad/s above |g, 0>
  double upper = 0.0;
  double splitting() const { return upper - lower; }
};

/// E_(+/-)(k) = k w_c + D/2 +/- sqrt(k g^2 + (D/2)^2) for k = 1..n_max.
std::vector<Manifold> jc_manifolds(double omega_c, double g, double detuning, int n_max);

struct Ladder {
  SpinBranch spin = SpinBranch::Down;
  double detuning = 0.0;
  std::vector<Manifold> manifolds;
};

/// Dressed ladders for both ground-spin branches.
std::vector<Ladder> jc_ladder(const CoupledSystem& system, int n_max);

enum class SpinState { Coupled, Uncoupled };
/// How the uncoupled spin enters the response: no emitter at all, or the
/// emitter at its own (detuned) leg frequency.
enum class UncoupledModel { ZeroCoupling, Detuned };

/// t = k_ext / (i(w_c - w) + k/2 + g^2 / (i(w_a - w) + gamma/2)), r = 1 - t.
std::complex<double> transmission_amplitude(const CavityMode& cavity, double omega, double g_eff, double omega_a,
                                            double gamma);

struct CavitySpectrum {
  std::vector<double> omega;  // rad/s
  std::vector<double> T;      // |t|^2
  std::vector<double> R;      // |r|^2

  /// `omega_Hz,T,R` CSV with omega written as omega / 2 pi.
  void write_csv(std::ostream& os) const;
};

CavitySpectrum transmission_spectrum(const CoupledSystem& system, SpinState spin, std::span<const double> omega_grid,
                                     UncoupledModel uncoupled = UncoupledModel::ZeroCoupling);

struct Peak {
  double omega = 0.0;
  double height = 0.0;
};
/// Local maxima above `min_height`, refined by parabolic interpolation.
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double min_height);
/// Full width at half maximum of the highest peak, linear interpolation.
double full_width_half_max(std::span<const double> x, std::span<const double> y);

struct ReadoutResult {
  double T_on = 0.0, T_off = 0.0, M = 0.0;
  long threshold = 0;         // counts >= threshold read as the brighter state
  double error_bright = 0.0;  // P(counts < threshold | brighter state)
  double error_dark = 0.0;    // P(counts >= threshold | darker state)
  double flip_penalty = 0.0;  // window / (2 T1)
  double fidelity = 0.5;
};

/// Poisson photon counting with the error-minimising integer threshold.
ReadoutResult readout_fidelity(double T_on, double T_off, double M,
                               double T1_spin = std::numeric_limits<double>::infinity(), double window = 0.0);

enum class ModeProfile { Cosine, Gaussian };

struct StragglePlacement {
  double sigma_depth = 80e-9;     // m
  double mode_halfwidth = 425e-9; // lambda / 2n, m
  ModeProfile profile = ModeProfile::Cosine;

  /// Relative field amplitude at depth offset z; 1 at the antinode.
  double relative_coupling(double z) const;
  void validate() const;
};

struct CouplingStats {
  double mean = 0.0;
  double std = 0.0;
  double rel_std = 0.0;
  double mean_stderror = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo over z ~ N(0, sigma_depth); sample i draws from (seed, i).
CouplingStats coupling_variation(const StragglePlacement& placement, std::size_t n_samples, std::uint64_t seed,
                                 Exec exec = Exec::Parallel);

}  // namespace donorqed::cavity
