#pragma once

#include <numbers>

namespace donorqed {

// CODATA-2018 values, SI units.
struct PhysicalConstants {
  static constexpr double mu_B = 9.2740100783e-24;   // J/T
  static constexpr double mu_N = 5.0507837461e-27;   // J/T
  static constexpr double h = 6.62607015e-34;        // J s (exact)
  static constexpr double hbar = h / (2.0 * std::numbers::pi);
  static constexpr double eps0 = 8.8541878128e-12;   // F/m
  static constexpr double c = 299792458.0;           // m/s (exact)
  static constexpr double debye = 1e-21 / c;         // C m
};

namespace units {
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Frequency per wavenumber: 1 cm^-1 = c * 100 Hz.
inline constexpr double kHzPerInverseCm = PhysicalConstants::c * 100.0;

inline constexpr double hz_to_angular(double f) { return kTwoPi * f; }
inline constexpr double angular_to_hz(double w) { return w / kTwoPi; }
inline constexpr double inverse_cm_to_hz(double k) { return k * kHzPerInverseCm; }
inline constexpr double hz_to_inverse_cm(double f) { return f / kHzPerInverseCm; }
}  // namespace units

}  // namespace donorqed
