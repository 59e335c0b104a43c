#pragma once

#include "donorqed/coherence/noise.hpp"
#include "donorqed/parallel.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace donorqed::coherence {

using Bloch = Eigen::Vector3d;

/// Two-level S0 <-> T0 qubit in the frame rotating at f0.
struct QubitModel {
  double f0 = 1.66e9;                                       // Hz
  double omega_R = units::kTwoPi * 10e3;                    // rad/s per unit drive amplitude
  double T1 = 360.0;                                        // s
  double T2_intr = 2.14;                                    // s
  double stretch = 1.0;                                     // intrinsic decay exponent

  void validate() const;
};

struct Pulse {
  double phase = 0.0;     // rotation axis angle in the x-y plane, rad
  double angle = 0.0;     // rotation angle, rad
  double duration = 0.0;  // s; 0 = ideal instantaneous rotation
};

struct Delay {
  double tau = 0.0;  // s
};

/// Marks where the Bloch vector is read out; the end of the sequence is
/// used when absent.
struct Acquire {};

using SequenceItem = std::variant<Pulse, Delay, Acquire>;

struct PulseSequence {
  std::vector<SequenceItem> items;
  double detuning = 0.0;  // deliberate drive detuning, rad/s

  PulseSequence& pulse(double phase, double angle, double duration = 0.0);
  PulseSequence& delay(double tau);
  PulseSequence& acquire();

  double duration() const;
  void validate() const;
};

/// Right-handed rotation of v about `axis` (need not be normalised) by the
/// angle |axis| * dt.
Bloch rotate(const Bloch& v, const Eigen::Vector3d& axis, double dt);

/// Single trajectory from |0> (Bloch z = +1).
Bloch evolve_trajectory(const QubitModel& qubit, const PulseSequence& seq, const NoiseRealization& noise);

struct EnsembleResult {
  Bloch mean = Bloch::Zero();
  Bloch stderror = Bloch::Zero();
  std::size_t trajectories = 0;
};

/// Per-point ensemble mean and standard error.
struct EnsembleStats {
  std::vector<double> mean;
  std::vector<double> stderror;
};

/// Runs `traj(index, out)` for every trajectory; `out` has n_out slots.
/// Results are stored per trajectory and reduced in index order, so the
/// serial and parallel paths agree bit for bit.
template <class TrajectoryFn>
EnsembleStats run_ensemble(std::size_t n_traj, std::size_t n_out, Exec exec, TrajectoryFn&& traj) {
  std::vector<double> samples(n_traj * n_out);
  for_each_index(n_traj, exec, [&](std::size_t i) {
    traj(i, std::span<double>(samples.data() + i * n_out, n_out));
  });
  EnsembleStats stats;
  stats.mean.assign(n_out, 0.0);
  stats.stderror.assign(n_out, 0.0);
  for (std::size_t i = 0; i < n_traj; ++i)
    for (std::size_t k = 0; k < n_out; ++k) stats.mean[k] += samples[i * n_out + k];
  for (auto& m : stats.mean) m /= static_cast<double>(n_traj);
  if (n_traj > 1) {
    for (std::size_t i = 0; i < n_traj; ++i)
      for (std::size_t k = 0; k < n_out; ++k) {
        const double d = samples[i * n_out + k] - stats.mean[k];
        stats.stderror[k] += d * d;
      }
    const double n = static_cast<double>(n_traj);
    for (auto& s : stats.stderror) s = std::sqrt(s / (n - 1.0) / n);
  }
  return stats;
}

inline constexpr std::size_t kDefaultTrajectories = 2000;

/// Trajectory-averaged Bloch vector at the acquisition point.
EnsembleResult evolve(const QubitModel& qubit, const PulseSequence& seq, const NoiseModel& noise,
                      std::size_t n_trajectories = kDefaultTrajectories, Exec exec = Exec::Parallel);

}  // namespace donorqed::coherence
