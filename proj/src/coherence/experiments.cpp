#include "donorqed/coherence/experiments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace donorqed::coherence {

using units::kPi;
using units::kTwoPi;

namespace {

void check_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0)
      throw std::invalid_argument(std::string(what) + ": grid values must be finite and >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
  }
}

SignalTrace make_trace(std::span<const double> x, EnsembleStats stats, const char* name, const NoiseModel& noise,
                       std::size_t trajectories) {
  SignalTrace t;
  t.x.assign(x.begin(), x.end());
  t.y = std::move(stats.mean);
  t.stderror = std::move(stats.stderror);
  t.experiment = name;
  t.seed = noise.seed;
  t.trajectories = trajectories;
  return t;
}

}  // namespace

SignalTrace rabi_experiment(const QubitModel& qubit, double amplitude, std::span<const double> durations,
                            const NoiseModel& noise, const RunOptions& run) {
  qubit.validate();
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("rabi: amplitude must be positive");
  check_grid(durations, "rabi");
  if (run.trajectories < 1) throw std::invalid_argument("rabi: need at least one trajectory");

  const auto tones = synthesis_tones(noise);
  const double rabi = qubit.omega_R * amplitude;
  auto stats = run_ensemble(run.trajectories, durations.size(), run.exec, [&](std::size_t i, std::span<double> out) {
    const auto realization = NoiseRealization::sample(noise, tones, i);
    Bloch v(0.0, 0.0, 1.0);
    double t = 0.0, phi = 0.0;
    // The drive is continuous, so each grid point extends the previous one.
    for (std::size_t k = 0; k < durations.size(); ++k) {
      const double span = durations[k] - t;
      if (span > 0.0) {
        const long steps = realization.time_dependent()
                               ? std::max<long>(1, static_cast<long>(std::ceil(span * 50.0 * rabi)))
                               : 1;
        const double dt = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
          const double t_next = (s == steps - 1) ? durations[k] : t + dt;
          const double phi_next =
              realization.time_dependent() ? realization.phase(t_next) : realization.static_offset() * t_next;
          const double h = t_next - t;
          v = rotate(v, Eigen::Vector3d(rabi, 0.0, (phi_next - phi) / h), h);
          t = t_next;
          phi = phi_next;
        }
      }
      out[k] = v.z();
    }
  });
  return make_trace(durations, std::move(stats), "rabi", noise, run.trajectories);
}

PulseSequence ramsey_sequence(double tau, double detuning_hz) {
  PulseSequence seq;
  seq.detuning = kTwoPi * detuning_hz;
  seq.pulse(0.0, kPi / 2).delay(tau).pulse(kPi, kPi / 2);
  return seq;
}

SignalTrace ramsey_experiment(const QubitModel& qubit, double detuning_hz, std::span<const double> taus,
                              const NoiseModel& noise, const RunOptions& run) {
  qubit.validate();
  check_grid(taus, "ramsey");
  if (!std::isfinite(detuning_hz)) throw std::invalid_argument("ramsey: non-finite detuning");
  if (run.trajectories < 1) throw std::invalid_argument("ramsey: need at least one trajectory");

  const auto tones = synthesis_tones(noise);
  auto stats = run_ensemble(run.trajectories, taus.size(), run.exec, [&](std::size_t i, std::span<double> out) {
    const auto realization = NoiseRealization::sample(noise, tones, i);
    for (std::size_t k = 0; k < taus.size(); ++k)
      out[k] = evolve_trajectory(qubit, ramsey_sequence(taus[k], detuning_hz), realization).z();
  });
  return make_trace(taus, std::move(stats), "ramsey", noise, run.trajectories);
}

PulseSequence hahn_sequence(double tau, double leading_phase, double refocus_angle) {
  PulseSequence seq;
  seq.pulse(leading_phase, kPi / 2).delay(tau).pulse(0.0, refocus_angle).delay(tau).pulse(0.0, kPi / 2);
  return seq;
}

HahnResult hahn_echo_experiment(const QubitModel& qubit, std::span<const double> taus, const NoiseModel& noise,
                                const HahnOptions& options, const RunOptions& run) {
  qubit.validate();
  check_grid(taus, "hahn");
  if (run.trajectories < 1) throw std::invalid_argument("hahn: need at least one trajectory");

  const auto tones = synthesis_tones(noise);
  auto stats = run_ensemble(run.trajectories, taus.size(), run.exec, [&](std::size_t i, std::span<double> out) {
    const auto realization = NoiseRealization::sample(noise, tones, i);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const double a = evolve_trajectory(qubit, hahn_sequence(taus[k], 0.0), realization).z() + options.offset;
      if (!options.phase_cycle) {
        out[k] = a;
        continue;
      }
      const double b = evolve_trajectory(qubit, hahn_sequence(taus[k], kPi), realization).z() + options.offset;
      out[k] = 0.5 * (a - b);
    }
  });

  std::vector<double> x(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) x[k] = 2.0 * taus[k];

  HahnResult result;
  result.trace = make_trace(x, std::move(stats), "hahn", noise, run.trajectories);
  result.fit = fit::fit_decay(result.trace, options.model);
  result.T2 = result.fit.get("T");
  result.T2_sigma = result.fit.sigma("T");
  return result;
}

PulseSequence cpmg_sequence(int n_pulses, double total_time) {
  if (n_pulses < 1) throw std::invalid_argument("cpmg: need at least one refocusing pulse");
  const double tau = total_time / (2.0 * n_pulses);
  PulseSequence seq;
  seq.pulse(0.0, kPi / 2).delay(tau);
  for (int j = 0; j < n_pulses; ++j) {
    seq.pulse(j % 2 == 0 ? 0.0 : kPi, kPi);
    seq.delay(j == n_pulses - 1 ? tau : 2.0 * tau);
  }
  // Each pi pulse about +-x flips the y component, so the parity of N
  // decides which closing phase maps the echo back onto +z.
  seq.pulse(n_pulses % 2 == 1 ? 0.0 : kPi, kPi / 2);
  return seq;
}

CpmgResult cpmg_experiment(const QubitModel& qubit, std::span<const int> n_pulses,
                           std::span<const double> total_times, const NoiseModel& noise, const RunOptions& run) {
  qubit.validate();
  check_grid(total_times, "cpmg");
  if (n_pulses.empty()) throw std::invalid_argument("cpmg: no pulse counts given");
  for (int n : n_pulses)
    if (n < 1 || (n & (n - 1)) != 0) throw std::invalid_argument("cpmg: pulse counts must be powers of two");
  if (run.trajectories < 1) throw std::invalid_argument("cpmg: need at least one trajectory");

  const auto tones = synthesis_tones(noise);
  CpmgResult result;
  for (int n : n_pulses) {
    auto stats = run_ensemble(run.trajectories, total_times.size(), run.exec,
                              [&](std::size_t i, std::span<double> out) {
                                const auto realization = NoiseRealization::sample(noise, tones, i);
                                for (std::size_t k = 0; k < total_times.size(); ++k)
                                  out[k] = evolve_trajectory(qubit, cpmg_sequence(n, total_times[k]), realization).z();
                              });
    CpmgRow row;
    row.n_pulses = n;
    row.trace = make_trace(total_times, std::move(stats), "cpmg", noise, run.trajectories);
    row.fit = fit::fit_decay(row.trace, fit::Model::Stretched);
    row.T2 = row.fit.get("T");
    row.T2_sigma = row.fit.sigma("T");
    row.stretch = row.fit.get("n");
    result.rows.push_back(std::move(row));
  }

  if (result.rows.size() >= 2) {
    std::vector<double> lx, ly;
    for (const auto& r : result.rows) {
      lx.push_back(std::log(static_cast<double>(r.n_pulses)));
      ly.push_back(std::log(r.T2));
    }
    const auto line = fit::fit_line(lx, ly);
    result.exponent = line.slope;
    result.exponent_sigma = line.slope_sigma;
  }
  return result;
}

SignalTrace t1_experiment(const QubitModel& qubit, std::span<const double> waits) {
  qubit.validate();
  check_grid(waits, "t1");
  const auto quiet = NoiseRealization::constant(0.0);
  SignalTrace t;
  t.experiment = "t1";
  t.trajectories = 1;
  for (double w : waits) {
    PulseSequence without, with;
    without.delay(w);
    with.pulse(0.0, kPi).delay(w);
    const double a = evolve_trajectory(qubit, without, quiet).z();
    const double b = evolve_trajectory(qubit, with, quiet).z();
    t.x.push_back(w);
    t.y.push_back(0.5 * (a - b));
    t.stderror.push_back(0.0);
  }
  return t;
}

SignalTrace refocusing_angle_scan(const QubitModel& qubit, std::span<const double> thetas, double tau) {
  qubit.validate();
  if (thetas.empty()) throw std::invalid_argument("tip-angle: empty grid");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] >= 0.0 && thetas[i] <= kTwoPi)) throw std::invalid_argument("tip-angle: theta must lie in [0, 2 pi]");
    if (i > 0 && !(thetas[i] > thetas[i - 1])) throw std::invalid_argument("tip-angle: grid must be strictly increasing");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("tip-angle: tau must be positive");

  // Eight equally spaced precession phases average a degree-2 trigonometric
  // polynomial exactly, which is the fully dephased limit.
  constexpr int kPhases = 8;
  auto echo = [&](double theta) {
    double sum = 0.0;
    for (int j = 0; j < kPhases; ++j) {
      const auto noise = NoiseRealization::constant(kTwoPi * j / (kPhases * tau));
      sum += evolve_trajectory(qubit, hahn_sequence(tau, 0.0, theta), noise).z();
    }
    return sum / kPhases;
  };
  const double reference = echo(kPi);
  SignalTrace t;
  t.experiment = "tip-angle";
  t.trajectories = kPhases;
  for (double th : thetas) {
    t.x.push_back(th);
    t.y.push_back(echo(th) / reference);
    t.stderror.push_back(0.0);
  }
  return t;
}

}  // namespace donorqed::coherence
