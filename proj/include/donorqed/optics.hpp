#pragma once

// 1s:A <-> 1s:Gamma7 optical lines: absorption spectra, optical pumping of
// the singlet/triplet pools, and linewidth/lifetime/dipole conversions.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace donorqed::optics {

/// Ground-state pool a line starts from. `Unpaired` is used for nuclear
/// spin-zero isotopes whose absorption does not depend on the pumping.
enum class GroundPool { Singlet, Triplet, Unpaired };

const char* pool_name(GroundPool p);

struct OpticalLine {
  double center_cm1 = 0.0;
  double fwhm_cm1 = 0.007;
  double strength = 1.0;  // relative area per unit pool population
  GroundPool ground = GroundPool::Singlet;
  std::string isotope = "77Se";

  double center_hz() const;
  void validate() const;
};

struct PopulationState {
  double singlet = 0.25;
  double triplet = 0.75;

  /// Degeneracy-weighted thermal state: 1 : 3 for I = 1/2.
  static PopulationState unpolarized() { return {0.25, 0.75}; }
  double of(GroundPool pool) const;
  void validate() const;
};

/// Nominal zero-phonon line position (2.9 um).
inline constexpr double kDefaultCenterCm1 = 1e4 / 2.9;

/// Default line table: the 77Se+ singlet and triplet lines split by the
/// ground hyperfine constant, plus 76Se+/78Se+ side peaks whose offsets and
/// strengths are configuration values.
std::vector<OpticalLine> default_lines(double center_cm1 = kDefaultCenterCm1, double hyperfine_hz = 1.66e9,
                                       double fwhm_cm1 = 0.007);

/// Area-normalised Lorentzian.
double lorentzian(double x, double center, double fwhm);

double line_area(const OpticalLine& line, const PopulationState& pops);

struct SpectrumTrace {
  std::vector<double> wavenumber_cm1;
  std::vector<double> absorbance;

  /// `wavenumber_cm1,absorbance` CSV.
  void write_csv(std::ostream& os) const;
};

SpectrumTrace absorption_spectrum(std::span<const OpticalLine> lines, const PopulationState& pops,
                                  std::span<const double> grid_cm1);

struct PumpModel {
  double power = 4e-6;        // W
  double rate_coeff = 0.0;    // 1/(s W)
  double branch_back = 0.0;   // probability of returning to the pumped pool

  double rate() const { return rate_coeff * power; }
  /// Depletion time constant 1 / (R (1 - b)).
  double time_constant() const;
  void validate() const;
};

/// rate_coeff giving the requested depletion time constant at `power`.
double calibrate_rate_coeff(double time_constant, double power, double branch_back = 0.0);

struct PopulationTrace {
  GroundPool pumped = GroundPool::Triplet;
  std::vector<double> t;
  std::vector<PopulationState> states;

  /// Fraction of spins in the pool being filled.
  double polarization(std::size_t i) const;
  void write_csv(std::ostream& os) const;
};

/// Two-pool rate equation dp/dt = -R (1 - b) p for the pumped pool.
PopulationTrace hyperpolarize(const PumpModel& pump, GroundPool pumped, std::span<const double> times,
                              const PopulationState& initial = PopulationState::unpolarized());

double linewidth_hz_from_cm1(double fwhm_cm1);
double linewidth_cm1_from_hz(double fwhm_hz);
/// tau = 1 / (2 pi dnu) for a lifetime-limited Lorentzian.
double lifetime_from_linewidth_hz(double fwhm_hz);
double linewidth_hz_from_lifetime(double tau);
double lifetime_from_linewidth_cm1(double fwhm_cm1);

/// tau_rad = 3 pi eps0 hbar c^3 / (n w^3 d^2), bulk index to the first power.
double radiative_lifetime(double dipole_debye, double wavelength_m, double index);
double dipole_from_lifetime(double tau_rad, double wavelength_m, double index);

struct LifetimeComparison {
  double radiative = 0.0;   // s, from the dipole
  double linewidth = 0.0;   // s, from the homogeneous width
  double ratio = 0.0;       // radiative / linewidth
};

/// Both lifetimes side by side; they are not reconciled.
LifetimeComparison compare_lifetimes(double dipole_debye, double wavelength_m, double index, double fwhm_cm1);

}  // namespace donorqed::optics
