#include "donorqed/optics.hpp"

#include "donorqed/constants.hpp"
#include "donorqed/io.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace donorqed::optics {

using C = PhysicalConstants;

const char* pool_name(GroundPool p) {
  switch (p) {
    case GroundPool::Singlet: return "singlet";
    case GroundPool::Triplet: return "triplet";
    case GroundPool::Unpaired: return "unpaired";
  }
  return "unknown";
}

double OpticalLine::center_hz() const { return units::inverse_cm_to_hz(center_cm1); }

void OpticalLine::validate() const {
  if (!std::isfinite(center_cm1)) throw std::invalid_argument("optical line: non-finite center");
  if (!(fwhm_cm1 > 0.0) || !std::isfinite(fwhm_cm1)) throw std::invalid_argument("optical line: fwhm must be positive");
  if (!(strength >= 0.0) || !std::isfinite(strength)) throw std::invalid_argument("optical line: strength must be >= 0");
}

double PopulationState::of(GroundPool pool) const {
  switch (pool) {
    case GroundPool::Singlet: return singlet;
    case GroundPool::Triplet: return triplet;
    case GroundPool::Unpaired: return 1.0;
  }
  return 0.0;
}

void PopulationState::validate() const {
  if (!(singlet >= 0.0) || !(triplet >= 0.0)) throw std::invalid_argument("populations must be >= 0");
  if (std::abs(singlet + triplet - 1.0) > 1e-12) throw std::invalid_argument("populations must sum to 1");
}

std::vector<OpticalLine> default_lines(double center_cm1, double hyperfine_hz, double fwhm_cm1) {
  const double a = units::hz_to_inverse_cm(hyperfine_hz);
  // Singlet sits 3A/4 below the hyperfine centroid, the triplet A/4 above.
  return {
      {center_cm1 + 0.75 * a, fwhm_cm1, 1.0, GroundPool::Singlet, "77Se"},
      {center_cm1 - 0.25 * a, fwhm_cm1, 1.0, GroundPool::Triplet, "77Se"},
      {center_cm1 + 0.035, fwhm_cm1, 0.02, GroundPool::Unpaired, "76Se"},
      {center_cm1 - 0.035, fwhm_cm1, 0.02, GroundPool::Unpaired, "78Se"},
  };
}

double lorentzian(double x, double center, double fwhm) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  return hw / (units::kPi * (d * d + hw * hw));
}

double line_area(const OpticalLine& line, const PopulationState& pops) { return line.strength * pops.of(line.ground); }

void SpectrumTrace::write_csv(std::ostream& os) const {
  io::write_columns(os, std::vector<std::string>{"wavenumber_cm1", "absorbance"},
                    std::vector<std::vector<double>>{wavenumber_cm1, absorbance});
}

SpectrumTrace absorption_spectrum(std::span<const OpticalLine> lines, const PopulationState& pops,
                                  std::span<const double> grid_cm1) {
  pops.validate();
  for (const auto& l : lines) l.validate();
  for (std::size_t i = 1; i < grid_cm1.size(); ++i)
    if (!(grid_cm1[i] > grid_cm1[i - 1])) throw std::invalid_argument("absorption: grid must be strictly increasing");

  SpectrumTrace s;
  s.wavenumber_cm1.assign(grid_cm1.begin(), grid_cm1.end());
  s.absorbance.assign(grid_cm1.size(), 0.0);
  for (const auto& l : lines) {
    const double area = line_area(l, pops);
    if (area == 0.0) continue;
    for (std::size_t i = 0; i < grid_cm1.size(); ++i) s.absorbance[i] += area * lorentzian(grid_cm1[i], l.center_cm1, l.fwhm_cm1);
  }
  return s;
}

double PumpModel::time_constant() const { return 1.0 / (rate() * (1.0 - branch_back)); }

void PumpModel::validate() const {
  if (!(power >= 0.0) || !std::isfinite(power)) throw std::invalid_argument("pump: power must be >= 0");
  if (!(rate_coeff > 0.0) || !std::isfinite(rate_coeff)) throw std::invalid_argument("pump: rate_coeff must be positive");
  if (!(branch_back >= 0.0 && branch_back < 1.0)) throw std::invalid_argument("pump: branch_back must lie in [0, 1)");
}

double calibrate_rate_coeff(double time_constant, double power, double branch_back) {
  if (!(time_constant > 0.0) || !(power > 0.0)) throw std::invalid_argument("calibration: time constant and power must be positive");
  if (!(branch_back >= 0.0 && branch_back < 1.0)) throw std::invalid_argument("calibration: branch_back must lie in [0, 1)");
  return 1.0 / (time_constant * power * (1.0 - branch_back));
}

double PopulationTrace::polarization(std::size_t i) const {
  return pumped == GroundPool::Singlet ? states.at(i).triplet : states.at(i).singlet;
}

void PopulationTrace::write_csv(std::ostream& os) const {
  os << "t_s,p_singlet,p_triplet,polarization\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << io::format_double(t[i]) << ',' << io::format_double(states[i].singlet) << ','
       << io::format_double(states[i].triplet) << ',' << io::format_double(polarization(i)) << '\n';
}

PopulationTrace hyperpolarize(const PumpModel& pump, GroundPool pumped, std::span<const double> times,
                              const PopulationState& initial) {
  pump.validate();
  initial.validate();
  if (pumped == GroundPool::Unpaired) throw std::invalid_argument("hyperpolarize: pumped pool must be singlet or triplet");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw std::invalid_argument("hyperpolarize: times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("hyperpolarize: grid must be strictly increasing");
  }
  const double k = pump.rate() * (1.0 - pump.branch_back);
  const double p0 = initial.of(pumped);

  PopulationTrace trace;
  trace.pumped = pumped;
  for (double t : times) {
    const double p = p0 * std::exp(-k * t);
    PopulationState s = pumped == GroundPool::Singlet ? PopulationState{p, 1.0 - p} : PopulationState{1.0 - p, p};
    trace.t.push_back(t);
    trace.states.push_back(s);
  }
  return trace;
}

double linewidth_hz_from_cm1(double fwhm_cm1) {
  if (!(fwhm_cm1 > 0.0)) throw std::invalid_argument("linewidth must be positive");
  return units::inverse_cm_to_hz(fwhm_cm1);
}

double linewidth_cm1_from_hz(double fwhm_hz) {
  if (!(fwhm_hz > 0.0)) throw std::invalid_argument("linewidth must be positive");
  return units::hz_to_inverse_cm(fwhm_hz);
}

double lifetime_from_linewidth_hz(double fwhm_hz) {
  if (!(fwhm_hz > 0.0)) throw std::invalid_argument("linewidth must be positive");
  return 1.0 / (units::kTwoPi * fwhm_hz);
}

double linewidth_hz_from_lifetime(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("lifetime must be positive");
  return 1.0 / (units::kTwoPi * tau);
}

double lifetime_from_linewidth_cm1(double fwhm_cm1) { return lifetime_from_linewidth_hz(linewidth_hz_from_cm1(fwhm_cm1)); }

namespace {

double rate_prefactor(double wavelength_m, double index) {
  if (!(wavelength_m > 0.0) || !(index > 0.0)) throw std::invalid_argument("wavelength and index must be positive");
  const double w = units::kTwoPi * C::c / wavelength_m;
  return index * w * w * w / (3.0 * units::kPi * C::eps0 * C::hbar * C::c * C::c * C::c);
}

}  // namespace

double radiative_lifetime(double dipole_debye, double wavelength_m, double index) {
  if (!(dipole_debye > 0.0)) throw std::invalid_argument("dipole must be positive");
  const double d = dipole_debye * C::debye;
  return 1.0 / (rate_prefactor(wavelength_m, index) * d * d);
}

double dipole_from_lifetime(double tau_rad, double wavelength_m, double index) {
  if (!(tau_rad > 0.0)) throw std::invalid_argument("lifetime must be positive");
  return std::sqrt(1.0 / (rate_prefactor(wavelength_m, index) * tau_rad)) / C::debye;
}

LifetimeComparison compare_lifetimes(double dipole_debye, double wavelength_m, double index, double fwhm_cm1) {
  LifetimeComparison c;
  c.radiative = radiative_lifetime(dipole_debye, wavelength_m, index);
  c.linewidth = lifetime_from_linewidth_cm1(fwhm_cm1);
  c.ratio = c.radiative / c.linewidth;
  return c;
}

}  // namespace donorqed::optics
