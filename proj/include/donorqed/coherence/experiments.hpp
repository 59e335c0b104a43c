#pragma once

// Pulsed magnetic-resonance experiments on the S0 <-> T0 qubit. Every trace
// is normalised to 1 at ideal full polarisation.

#include "donorqed/coherence/dynamics.hpp"
#include "donorqed/fit.hpp"
#include "donorqed/trace.hpp"

#include <span>
#include <vector>

namespace donorqed::coherence {

struct RunOptions {
  std::size_t trajectories = kDefaultTrajectories;
  Exec exec = Exec::Parallel;
};

/// Continuous drive of amplitude `amplitude` (Rabi rate omega_R * amplitude)
/// for each duration in the grid; y = <z>.
SignalTrace rabi_experiment(const QubitModel& qubit, double amplitude, std::span<const double> durations,
                            const NoiseModel& noise, const RunOptions& run = {});

/// pi/2 - tau - pi/2 with a deliberate detuning (Hz); y = <cos(phase)>.
SignalTrace ramsey_experiment(const QubitModel& qubit, double detuning_hz, std::span<const double> taus,
                              const NoiseModel& noise, const RunOptions& run = {});

/// Ramsey sequence for one free-evolution time; exposed for reuse.
PulseSequence ramsey_sequence(double tau, double detuning_hz);

struct HahnOptions {
  bool phase_cycle = true;
  double offset = 0.0;  // constant detector baseline added to every raw shot
  fit::Model model = fit::Model::Stretched;
};

struct HahnResult {
  SignalTrace trace;  // x = total free evolution 2 tau
  fit::Result fit;
  double T2 = 0.0;
  double T2_sigma = 0.0;
};

/// pi/2_phi - tau - pi_x - tau - pi/2_x. With phase cycling the leading pulse
/// is run at phi = 0 and pi and the two traces are half-differenced.
HahnResult hahn_echo_experiment(const QubitModel& qubit, std::span<const double> taus, const NoiseModel& noise,
                                const HahnOptions& options = {}, const RunOptions& run = {});

PulseSequence hahn_sequence(double tau, double leading_phase = 0.0, double refocus_angle = units::kPi);

/// pi/2_x - tau - pi_(+x) - 2 tau - pi_(-x) - ... - tau - pi/2 with total free
/// evolution 2 N tau. The closing pulse phase is chosen so the ideal signal
/// is +1.
PulseSequence cpmg_sequence(int n_pulses, double total_time);

struct CpmgRow {
  int n_pulses = 0;
  double T2 = 0.0;
  double T2_sigma = 0.0;
  double stretch = 0.0;
  SignalTrace trace;  // x = total free evolution time
  fit::Result fit;
};

struct CpmgResult {
  std::vector<CpmgRow> rows;
  double exponent = 0.0;  // d log T2 / d log N
  double exponent_sigma = 0.0;
};

/// `total_times` is the grid of total free-evolution times 2 N tau shared by
/// every N. N values must be powers of two.
CpmgResult cpmg_experiment(const QubitModel& qubit, std::span<const int> n_pulses,
                           std::span<const double> total_times, const NoiseModel& noise,
                           const RunOptions& run = {});

/// Polarisation difference between runs without and with a leading
/// inversion pulse, halved so y(0) = 1.
SignalTrace t1_experiment(const QubitModel& qubit, std::span<const double> waits);

/// Echo amplitude against the refocusing rotation angle, averaged exactly
/// over a uniform spread of free-precession phases and normalised to theta = pi.
SignalTrace refocusing_angle_scan(const QubitModel& qubit, std::span<const double> thetas, double tau = 1e-3);

}  // namespace donorqed::coherence
