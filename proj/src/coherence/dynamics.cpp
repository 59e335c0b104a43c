#include "donorqed/coherence/dynamics.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace donorqed::coherence {

void QubitModel::validate() const {
  if (!(omega_R > 0.0) || !std::isfinite(omega_R)) throw std::invalid_argument("qubit: omega_R must be positive");
  if (!(T1 > 0.0)) throw std::invalid_argument("qubit: T1 must be positive");
  if (!(T2_intr > 0.0)) throw std::invalid_argument("qubit: T2_intr must be positive");
  if (T2_intr > 2.0 * T1) throw std::invalid_argument("qubit: T2_intr must not exceed 2 T1");
  if (!(stretch >= 1.0 && stretch <= 3.0)) throw std::invalid_argument("qubit: stretch must lie in [1, 3]");
}

PulseSequence& PulseSequence::pulse(double phase, double angle, double duration) {
  items.emplace_back(Pulse{phase, angle, duration});
  return *this;
}

PulseSequence& PulseSequence::delay(double tau) {
  items.emplace_back(Delay{tau});
  return *this;
}

PulseSequence& PulseSequence::acquire() {
  items.emplace_back(Acquire{});
  return *this;
}

double PulseSequence::duration() const {
  double t = 0.0;
  for (const auto& item : items) {
    if (const auto* p = std::get_if<Pulse>(&item)) t += p->duration;
    if (const auto* d = std::get_if<Delay>(&item)) t += d->tau;
  }
  return t;
}

void PulseSequence::validate() const {
  if (items.empty()) throw std::invalid_argument("pulse sequence is empty");
  if (!std::isfinite(detuning)) throw std::invalid_argument("pulse sequence: non-finite detuning");
  for (const auto& item : items) {
    if (const auto* p = std::get_if<Pulse>(&item)) {
      if (!std::isfinite(p->phase) || !std::isfinite(p->angle) || p->angle < 0.0)
        throw std::invalid_argument("pulse: phase must be finite and angle finite and >= 0");
      if (!(p->duration >= 0.0) || !std::isfinite(p->duration))
        throw std::invalid_argument("pulse: duration must be finite and >= 0");
    }
    if (const auto* d = std::get_if<Delay>(&item))
      if (!(d->tau >= 0.0) || !std::isfinite(d->tau)) throw std::invalid_argument("delay: tau must be finite and >= 0");
  }
}

Bloch rotate(const Bloch& v, const Eigen::Vector3d& axis, double dt) {
  const double rate = axis.norm();
  const double theta = rate * dt;
  if (theta == 0.0) return v;
  const Eigen::Vector3d k = axis / rate;
  const double c = std::cos(theta), s = std::sin(theta);
  return v * c + k.cross(v) * s + k * (k.dot(v)) * (1.0 - c);
}

namespace {

double stretched_log_decay(double t, double T, double n) {
  if (!std::isfinite(T)) return 0.0;
  return std::pow(t / T, n);
}

}  // namespace

Bloch evolve_trajectory(const QubitModel& qubit, const PulseSequence& seq, const NoiseRealization& noise) {
  Bloch v(0.0, 0.0, 1.0);
  Bloch acquired = v;
  bool have_acquired = false;
  double t = 0.0;
  double phi = 0.0;  // noise phase accumulated up to t

  for (const auto& item : seq.items) {
    if (const auto* p = std::get_if<Pulse>(&item)) {
      const Eigen::Vector3d dir(std::cos(p->phase), std::sin(p->phase), 0.0);
      if (p->duration == 0.0) {
        v = rotate(v, dir * p->angle, 1.0);
        continue;
      }
      const double rabi = p->angle / p->duration;
      const long steps = noise.time_dependent()
                             ? std::max<long>(1, static_cast<long>(std::ceil(p->duration * 50.0 * rabi)))
                             : 1;
      const double dt = p->duration / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        const double t_next = t + dt;
        const double phi_next = noise.time_dependent() ? noise.phase(t_next) : noise.static_offset() * t_next;
        const double delta = (phi_next - phi) / dt + seq.detuning;
        Eigen::Vector3d axis = dir * rabi;
        axis.z() = delta;
        v = rotate(v, axis, dt);
        t = t_next;
        phi = phi_next;
      }
    } else if (const auto* d = std::get_if<Delay>(&item)) {
      if (d->tau == 0.0) continue;
      const double t_next = t + d->tau;
      const double phi_next = noise.time_dependent() ? noise.phase(t_next) : noise.static_offset() * t_next;
      const double precession = (phi_next - phi) + seq.detuning * d->tau;
      v = rotate(v, Eigen::Vector3d(0.0, 0.0, precession), 1.0);
      const double transverse = std::exp(stretched_log_decay(t, qubit.T2_intr, qubit.stretch) -
                                         stretched_log_decay(t_next, qubit.T2_intr, qubit.stretch));
      v.x() *= transverse;
      v.y() *= transverse;
      if (std::isfinite(qubit.T1)) v.z() *= std::exp(-d->tau / qubit.T1);
      t = t_next;
      phi = phi_next;
    } else {
      acquired = v;
      have_acquired = true;
    }
  }
  return have_acquired ? acquired : v;
}

EnsembleResult evolve(const QubitModel& qubit, const PulseSequence& seq, const NoiseModel& noise,
                      std::size_t n_trajectories, Exec exec) {
  qubit.validate();
  seq.validate();
  if (n_trajectories < 1) throw std::invalid_argument("evolve: need at least one trajectory");
  const auto tones = synthesis_tones(noise);
  const auto stats = run_ensemble(n_trajectories, 3, exec, [&](std::size_t i, std::span<double> out) {
    const auto realization = NoiseRealization::sample(noise, tones, i);
    const Bloch b = evolve_trajectory(qubit, seq, realization);
    out[0] = b.x();
    out[1] = b.y();
    out[2] = b.z();
  });
  EnsembleResult r;
  r.mean = Bloch(stats.mean[0], stats.mean[1], stats.mean[2]);
  r.stderror = Bloch(stats.stderror[0], stats.stderror[1], stats.stderror[2]);
  r.trajectories = n_trajectories;
  return r;
}

}  // namespace donorqed::coherence
