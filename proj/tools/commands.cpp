#include "commands.hpp"

#include "plot.hpp"

#include "donorqed/cavity.hpp"
#include "donorqed/coherence/experiments.hpp"
#include "donorqed/io.hpp"
#include "donorqed/optics.hpp"
#include "donorqed/spin.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace donorqed::cli {

using units::kPi;
using units::kTwoPi;

namespace {

constexpr const char* kVersion = "0.1.0";

ParamSpec num(std::string key, std::string unit, std::string def, std::string help) {
  return {std::move(key), Kind::Number, std::move(unit), std::move(def), std::move(help), {}};
}
ParamSpec integer(std::string key, std::string def, std::string help) {
  return {std::move(key), Kind::Integer, "", std::move(def), std::move(help), {}};
}
ParamSpec text(std::string key, std::string def, std::string help) {
  return {std::move(key), Kind::Text, "", std::move(def), std::move(help), {}};
}
ParamSpec choice(std::string key, std::string def, std::vector<std::string> choices, std::string help) {
  return {std::move(key), Kind::Choice, "", std::move(def), std::move(help), std::move(choices)};
}
ParamSpec flag(std::string key, std::string def, std::string help) {
  return {std::move(key), Kind::Flag, "", std::move(def), std::move(help), {}};
}
ParamSpec grid(std::string key, std::string unit, std::string def, std::string help) {
  return {std::move(key), Kind::Grid, std::move(unit), std::move(def), std::move(help), {}};
}

std::vector<ParamSpec> concat(std::initializer_list<std::vector<ParamSpec>> parts) {
  std::vector<ParamSpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string to_csv(const auto& table) {
  std::ostringstream os;
  table.write_csv(os);
  return os.str();
}

// ---- spin system -----------------------------------------------------------

std::vector<ParamSpec> system_params() {
  return {
      text("isotope", "77Se", "preset name: 77Se, 33S, 123Te or 125Te"),
      num("ge", "", "", "electron g-factor override"),
      num("gn", "", "", "nuclear g-factor override"),
      num("nuclear-spin", "", "", "nuclear spin quantum number override"),
      num("hyperfine", "Hz", "", "hyperfine constant A override"),
  };
}

spin::SpinSystem make_system(const Params& p) {
  spin::SpinSystem s = spin::preset(p.text("isotope"));
  if (auto v = p.optional_number("ge")) s.g_e = *v;
  if (auto v = p.optional_number("gn")) s.g_n = *v;
  if (auto v = p.optional_number("nuclear-spin")) s.I = *v;
  if (auto v = p.optional_number("hyperfine")) s.A = *v;
  s.validate();
  return s;
}

std::vector<spin::TransitionPair> default_pairs(const spin::SpinSystem& sys) {
  const auto labels = spin::level_labels(sys);
  // Transitions out of the lowest zero-field level.
  const auto es = spin::zero_field_eigensystem(sys);
  const std::string ground = es.labels.at(0);
  std::vector<spin::TransitionPair> pairs;
  for (const auto& l : labels)
    if (l != ground) pairs.push_back({ground, l});
  return pairs;
}

Json system_json(const spin::SpinSystem& s) {
  return {{"name", s.name}, {"g_e", s.g_e}, {"g_n", s.g_n}, {"I", s.I}, {"A_Hz", s.A}};
}

Outcome cmd_breit_rabi(const Params& p) {
  const auto sys = make_system(p);
  const auto list = p.text("pairs");
  const auto pairs = list.empty() ? default_pairs(sys) : spin::parse_pairs(list, sys);
  const auto n = p.integer("points");
  if (n < 2 || n > 10'000'000) throw ConfigError("breit-rabi.points: must lie in [2, 1e7]");
  const auto table = spin::field_sweep(sys, p.number("bmin"), p.number("bmax"), static_cast<int>(n), pairs);
  Outcome o;
  o.csv = to_csv(table);
  o.results["system"] = system_json(sys);
  Json names = Json::array();
  for (const auto& pr : pairs) names.push_back(pr.name());
  o.results["pairs"] = names;
  o.results["rows"] = table.B.size();
  return o;
}

Outcome cmd_clock_find(const Params& p) {
  const auto sys = make_system(p);
  const auto pair = spin::parse_pair(p.text("pair"), sys);
  spin::ClockSearchOptions opt;
  opt.grid_points = static_cast<int>(p.integer("grid"));
  opt.d1_tolerance = p.number("tolerance");
  const auto points = spin::find_clock_transition(sys, pair, p.number("bmin"), p.number("bmax"), opt);
  std::ostringstream os;
  os << "B_T,f_Hz,d1_Hz_per_T,d2_Hz_per_T2,d1_step_T,d2_step_T\n";
  Json list = Json::array();
  for (const auto& c : points) {
    os << io::format_double(c.B) << ',' << io::format_double(c.f) << ',' << io::format_double(c.d1) << ','
       << io::format_double(c.d2) << ',' << io::format_double(c.d1_step) << ',' << io::format_double(c.d2_step) << '\n';
    list.push_back({{"B_T", c.B}, {"f_Hz", c.f}, {"d1_Hz_per_T", c.d1}, {"d2_Hz_per_T2", c.d2},
                    {"d1_step_T", c.d1_step}, {"d2_step_T", c.d2_step}});
  }
  Outcome o;
  o.csv = os.str();
  o.results["system"] = system_json(sys);
  o.results["pair"] = pair.name();
  o.results["clock_points"] = list;
  return o;
}

// ---- coherence ---------------------------------------------------------------

std::vector<ParamSpec> qubit_params(const std::string& t2) {
  return {
      num("f0", "Hz", "1.66GHz", "qubit transition frequency"),
      num("rabi", "Hz", "10kHz", "Rabi frequency per unit drive amplitude"),
      num("t1", "s", "360", "longitudinal relaxation time"),
      num("t2", "s", t2, "intrinsic coherence time"),
      num("stretch", "", "1", "intrinsic decay exponent n in exp(-(t/T2)^n)"),
  };
}

std::vector<ParamSpec> noise_params(const std::string& t2star, const std::string& s0) {
  return {
      num("t2star", "s", t2star, "quasi-static dephasing time sqrt(2)/sigma; 0 disables"),
      num("alpha", "", "1", "power-law exponent of S(w) = S0 w^-alpha"),
      num("s0", "", s0, "spectral amplitude S0 in (rad/s)^2 (rad/s)^(alpha-1); 0 disables"),
      num("f-lo", "Hz", "1mHz", "lower spectral cutoff"),
      num("f-hi", "Hz", "1kHz", "upper spectral cutoff"),
      integer("tones", "200", "number of synthesis tones"),
      integer("seed", "1", "random seed"),
      integer("trajectories", "2000", "Monte-Carlo trajectories"),
  };
}

coherence::QubitModel make_qubit(const Params& p) {
  coherence::QubitModel q;
  q.f0 = p.number("f0");
  q.omega_R = kTwoPi * p.number("rabi");
  q.T1 = p.number("t1");
  q.T2_intr = p.number("t2");
  q.stretch = p.number("stretch");
  q.validate();
  return q;
}

coherence::NoiseModel make_noise(const Params& p) {
  coherence::NoiseModel n;
  const double t2s = p.number("t2star");
  if (t2s < 0.0) throw ConfigError("t2star: must be >= 0");
  n.sigma_qs = t2s > 0.0 ? coherence::sigma_for_t2star(t2s) : 0.0;
  n.alpha = p.number("alpha");
  n.S0 = p.number("s0");
  n.omega_lo = kTwoPi * p.number("f-lo");
  n.omega_hi = kTwoPi * p.number("f-hi");
  const auto tones = p.integer("tones");
  if (tones < 0 || tones > 100000) throw ConfigError("tones: must lie in [0, 100000]");
  n.n_tones = static_cast<int>(tones);
  const auto seed = p.integer("seed");
  if (seed < 0) throw ConfigError("seed: must be >= 0");
  n.seed = static_cast<std::uint64_t>(seed);
  n.validate();
  return n;
}

coherence::RunOptions make_run(const Params& p) {
  const auto n = p.integer("trajectories");
  if (n < 1 || n > 100'000'000) throw ConfigError("trajectories: must lie in [1, 1e8]");
  return {static_cast<std::size_t>(n), Exec::Parallel};
}

Json fit_json(const fit::Result& r) {
  Json params = Json::object(), sigmas = Json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    params[r.names[i]] = r.params[i];
    sigmas[r.names[i]] = r.sigmas[i];
  }
  return {{"model", std::string(fit::model_name(r.model))}, {"params", params}, {"sigmas", sigmas},
          {"residual", r.residual_norm}, {"converged", r.converged}, {"status", r.status}};
}

void note_fit(Outcome& o, const fit::Result& r, const std::string& what) {
  if (!r.converged && o.failure.empty()) o.failure = what + " fit did not converge: " + r.status;
}

Outcome cmd_rabi(const Params& p) {
  const auto q = make_qubit(p);
  const auto noise = make_noise(p);
  const double amp = p.number("amplitude");
  const auto durations = p.grid("durations");
  const auto trace = coherence::rabi_experiment(q, amp, durations, noise, make_run(p));
  Outcome o;
  o.csv = to_csv(trace);
  o.seed = noise.seed;
  fit::Options opt;
  opt.frequency_hint = q.omega_R * amp / kTwoPi;
  const auto model = noise.is_silent() ? fit::Model::Sinusoid : fit::Model::GaussianSinusoid;
  const auto f = fit::fit_decay(trace, model, opt);
  o.results["fit"] = fit_json(f);
  o.results["rabi_frequency_Hz"] = f.get("f");
  note_fit(o, f, "rabi");
  return o;
}

Outcome cmd_ramsey(const Params& p) {
  const auto q = make_qubit(p);
  const auto noise = make_noise(p);
  const double det = p.number("detuning");
  const auto trace = coherence::ramsey_experiment(q, det, p.grid("taus"), noise, make_run(p));
  Outcome o;
  o.csv = to_csv(trace);
  o.seed = noise.seed;
  fit::Options opt;
  opt.frequency_hint = det;
  const auto f = fit::fit_decay(trace, fit::Model::GaussianSinusoid, opt);
  o.results["fit"] = fit_json(f);
  o.results["T2star_s"] = f.get("T");
  o.results["T2star_sigma_s"] = f.sigma("T");
  o.results["fringe_frequency_Hz"] = f.get("f");
  note_fit(o, f, "ramsey");
  return o;
}

Outcome cmd_hahn(const Params& p) {
  const auto q = make_qubit(p);
  const auto noise = make_noise(p);
  coherence::HahnOptions h;
  h.phase_cycle = p.flag("phase-cycle");
  h.offset = p.number("offset");
  h.model = fit::parse_model(p.text("model"));
  const auto r = coherence::hahn_echo_experiment(q, p.grid("taus"), noise, h, make_run(p));
  Outcome o;
  o.csv = to_csv(r.trace);
  o.seed = noise.seed;
  o.results["fit"] = fit_json(r.fit);
  o.results["T2_s"] = r.T2;
  o.results["T2_sigma_s"] = r.T2_sigma;
  note_fit(o, r.fit, "hahn");
  return o;
}

Outcome cmd_cpmg(const Params& p) {
  const auto q = make_qubit(p);
  const auto noise = make_noise(p);
  std::vector<int> ns;
  for (auto v : p.int_list("n")) {
    if (v < 1 || v > (1 << 20)) throw ConfigError("pulse.cpmg.n: pulse counts must lie in [1, 2^20]");
    ns.push_back(static_cast<int>(v));
  }
  const auto r = coherence::cpmg_experiment(q, ns, p.grid("times"), noise, make_run(p));
  Outcome o;
  o.seed = noise.seed;
  std::ostringstream os;
  os << "n_pulses,T2_s,T2_sigma_s,stretch\n";
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    os << row.n_pulses << ',' << io::format_double(row.T2) << ',' << io::format_double(row.T2_sigma) << ','
       << io::format_double(row.stretch) << '\n';
    rows.push_back({{"n_pulses", row.n_pulses}, {"T2_s", row.T2}, {"T2_sigma_s", row.T2_sigma}, {"fit", fit_json(row.fit)}});
    note_fit(o, row.fit, "cpmg N=" + std::to_string(row.n_pulses));
  }
  o.csv = os.str();
  o.results["rows"] = rows;
  if (r.rows.size() >= 2) {
    o.results["exponent"] = r.exponent;
    o.results["exponent_sigma"] = r.exponent_sigma;
  }
  return o;
}

Outcome cmd_t1(const Params& p) {
  const auto q = make_qubit(p);
  const auto trace = coherence::t1_experiment(q, p.grid("waits"));
  Outcome o;
  o.csv = to_csv(trace);
  if (trace.size() >= 6) {
    fit::Options opt;
    opt.initial = std::vector<double>{1.0, q.T1, 0.0};
    const auto f = fit::fit_decay(trace, fit::Model::Exponential, opt);
    o.results["fit"] = fit_json(f);
    o.results["T1_s"] = f.get("T");
    note_fit(o, f, "t1");
  }
  return o;
}

Outcome cmd_tip_angle(const Params& p) {
  const auto q = make_qubit(p);
  const auto trace = coherence::refocusing_angle_scan(q, p.grid("thetas"), p.number("tau"));
  Outcome o;
  o.csv = to_csv(trace);
  if (trace.size() >= 5) {
    const auto f = fit::fit_decay(trace, fit::Model::SinSquaredHalfAngle);
    o.results["fit"] = fit_json(f);
    note_fit(o, f, "tip-angle");
  }
  return o;
}

// ---- optics ------------------------------------------------------------------

Outcome cmd_polarize(const Params& p) {
  optics::PumpModel pump;
  pump.power = p.number("power");
  pump.branch_back = p.number("branch-back");
  pump.rate_coeff = optics::calibrate_rate_coeff(p.number("cal-tau"), p.number("cal-power"), pump.branch_back);
  pump.validate();
  const auto pool = p.text("pumped") == "singlet" ? optics::GroundPool::Singlet : optics::GroundPool::Triplet;
  const double s0 = p.number("initial-singlet");
  const optics::PopulationState init{s0, 1.0 - s0};
  const auto trace = optics::hyperpolarize(pump, pool, p.grid("times"), init);
  Outcome o;
  o.csv = to_csv(trace);
  const double tau = pump.time_constant();
  const double t10[] = {10.0 * tau};
  o.results["rate_coeff_per_s_W"] = pump.rate_coeff;
  o.results["time_constant_s"] = tau;
  o.results["final_polarization"] = trace.states.empty() ? 0.0 : trace.polarization(trace.states.size() - 1);
  o.results["polarization_at_10_tau"] = optics::hyperpolarize(pump, pool, t10, init).polarization(0);
  return o;
}

Outcome cmd_absorption(const Params& p) {
  const double center = p.number("center");
  auto lines = optics::default_lines(center, p.number("hyperfine"), p.number("fwhm"));
  const double off = p.number("side-offset"), strength = p.number("side-strength");
  lines[2].center_cm1 = center + off;
  lines[3].center_cm1 = center - off;
  lines[2].strength = lines[3].strength = strength;

  optics::PopulationState pops;
  const auto state = p.text("state");
  if (state == "singlet") pops = {1.0, 0.0};
  else if (state == "triplet") pops = {0.0, 1.0};
  else if (state == "custom") pops = {p.number("singlet"), 1.0 - p.number("singlet")};

  const double span = p.number("span");
  const auto n = p.integer("points");
  if (n < 2 || !(span > 0.0)) throw ConfigError("spectrum.absorption: need span > 0 and points >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = center - span + 2.0 * span * static_cast<double>(i) / (n - 1);
  const auto s = optics::absorption_spectrum(lines, pops, g);
  Outcome o;
  o.csv = to_csv(s);
  Json list = Json::array();
  for (const auto& l : lines)
    list.push_back({{"isotope", l.isotope}, {"pool", optics::pool_name(l.ground)}, {"center_cm1", l.center_cm1},
                    {"fwhm_cm1", l.fwhm_cm1}, {"area", optics::line_area(l, pops)}});
  o.results["lines"] = list;
  o.results["populations"] = {{"singlet", pops.singlet}, {"triplet", pops.triplet}};
  return o;
}

// ---- cavity ------------------------------------------------------------------

std::vector<ParamSpec> cavity_params() {
  return {
      num("wavelength", "m", "2.9um", "cavity resonance vacuum wavelength"),
      num("q", "", "1e5", "quality factor"),
      num("kext", "", "0.5", "per-port external coupling as a fraction of kappa, (0, 0.5]"),
      num("vrel", "", "0.1", "mode volume in units of (lambda/n)^3"),
      num("index", "", "3.45", "refractive index"),
      num("dipole", "D", "1.3", "transition dipole"),
      num("linewidth", "", "0.007", "emitter homogeneous FWHM in cm^-1"),
      num("splitting", "Hz", "", "override 2g/2pi; empty uses the coupling formula"),
      num("detuning", "Hz", "0", "emitter zero-field offset from the cavity, (w_a - w_c)/2pi"),
      num("b", "T", "0", "magnetic field"),
      num("tune", "Hz", "0", "excited-state tuning delta_tune/2pi"),
      flag("retune", "false", "choose the tuning that puts the coupled spin's leg on resonance"),
      choice("leg", "spin-flip", {"spin-flip", "spin-conserving"}, "Lambda leg addressed by the cavity"),
      choice("coupled", "down", {"down", "up"}, "ground spin state whose leg is coupled"),
      num("g-ground", "", "2.0057", "ground-state g-factor"),
      num("g-excited", "", "0.644", "excited-state g-factor"),
  };
}

cavity::CoupledSystem make_coupled(const Params& p) {
  cavity::CavityMode m;
  m.lambda0 = p.number("wavelength");
  m.Q = p.number("q");
  m.kappa_ext_fraction = p.number("kext");
  m.V_rel = p.number("vrel");
  m.n = p.number("index");
  cavity::Emitter e;
  e.d_debye = p.number("dipole");
  e.gamma = kTwoPi * optics::linewidth_hz_from_cm1(p.number("linewidth"));
  e.omega_a = m.omega_c() + kTwoPi * p.number("detuning");
  e.g_ground = p.number("g-ground");
  e.g_excited = p.number("g-excited");
  const auto leg = p.text("leg") == "spin-flip" ? cavity::LambdaLeg::SpinFlip : cavity::LambdaLeg::SpinConserving;
  const auto spin = p.text("coupled") == "down" ? cavity::SpinBranch::Down : cavity::SpinBranch::Up;
  auto s = cavity::CoupledSystem::make(m, e, p.number("b"), kTwoPi * p.number("tune"), leg, spin);
  if (auto split = p.optional_number("splitting")) {
    if (!(*split >= 0.0)) throw ConfigError("splitting: must be >= 0");
    s.g = 0.5 * kTwoPi * *split;
  }
  if (p.flag("retune")) s.delta_tune = s.retune_for(s.coupled_spin);
  return s;
}

Json coupling_json(const cavity::CoupledSystem& s) {
  const auto sc = cavity::strong_coupling_check(s.g, s.cavity.kappa(), s.emitter.gamma);
  return {{"g_over_2pi_Hz", s.g / kTwoPi},
          {"two_g_over_2pi_Hz", 2.0 * s.g / kTwoPi},
          {"kappa_over_2pi_Hz", s.cavity.kappa() / kTwoPi},
          {"gamma_over_2pi_Hz", s.emitter.gamma / kTwoPi},
          {"cooperativity", sc.cooperativity},
          {"two_g_over_gamma", sc.ratio},
          {"strong", sc.strong},
          {"delta_tune_over_2pi_Hz", s.delta_tune / kTwoPi},
          {"detuning_down_over_2pi_Hz", s.detuning(cavity::SpinBranch::Down) / kTwoPi},
          {"detuning_up_over_2pi_Hz", s.detuning(cavity::SpinBranch::Up) / kTwoPi}};
}

Outcome cmd_cavity_spectrum(const Params& p) {
  const auto s = make_coupled(p);
  const double span = p.number("span");
  const auto n = p.integer("points");
  if (n < 3 || !(span > 0.0)) throw ConfigError("spectrum.cavity: need span > 0 and points >= 3");
  const double wc = s.cavity.omega_c();
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(i)] = wc + kTwoPi * span * (-0.5 + static_cast<double>(i) / (n - 1));
  const auto model = p.text("uncoupled-model") == "zero" ? cavity::UncoupledModel::ZeroCoupling : cavity::UncoupledModel::Detuned;
  const auto which = p.text("spin");
  const auto coupled = cavity::transmission_spectrum(s, cavity::SpinState::Coupled, grid, model);
  const auto bare = cavity::transmission_spectrum(s, cavity::SpinState::Uncoupled, grid, model);

  Outcome o;
  if (which == "coupled") o.csv = to_csv(coupled);
  else if (which == "uncoupled") o.csv = to_csv(bare);
  else {
    std::ostringstream os;
    os << "omega_Hz,T_coupled,R_coupled,T_uncoupled,R_uncoupled\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      os << io::format_double(units::angular_to_hz(grid[i])) << ',' << io::format_double(coupled.T[i]) << ','
         << io::format_double(coupled.R[i]) << ',' << io::format_double(bare.T[i]) << ',' << io::format_double(bare.R[i])
         << '\n';
    o.csv = os.str();
  }
  o.results["coupling"] = coupling_json(s);
  Json peaks = Json::array();
  for (const auto& pk : cavity::find_peaks(coupled.omega, coupled.T, 0.01))
    peaks.push_back({{"offset_Hz", (pk.omega - wc) / kTwoPi}, {"T", pk.height}});
  o.results["coupled_peaks"] = peaks;
  const double t_on = std::norm(cavity::transmission_amplitude(s.cavity, wc, s.g, s.emitter_frequency(s.coupled_spin), s.emitter.gamma));
  const double t_off = std::norm(cavity::transmission_amplitude(
      s.cavity, wc, model == cavity::UncoupledModel::ZeroCoupling ? 0.0 : s.g, s.emitter_frequency(s.uncoupled_spin()),
      s.emitter.gamma));
  o.results["T_resonance_coupled"] = t_on;
  o.results["T_resonance_uncoupled"] = t_off;
  o.results["contrast_ratio"] = t_off > 0.0 ? t_on / t_off : 0.0;
  return o;
}

Outcome cmd_ladder(const Params& p) {
  const auto s = make_coupled(p);
  const auto nmax = p.integer("nmax");
  if (nmax < 1 || nmax > 1000) throw ConfigError("ladder.nmax: must lie in [1, 1000]");
  const auto ladders = cavity::jc_ladder(s, static_cast<int>(nmax));
  const double wc = s.cavity.omega_c();
  std::ostringstream os;
  os << "branch,k,detuning_Hz,lower_Hz,upper_Hz\n";
  Json out = Json::array();
  for (const auto& l : ladders) {
    Json rows = Json::array();
    for (const auto& m : l.manifolds) {
      const double lo = (m.lower - m.k * wc) / kTwoPi, hi = (m.upper - m.k * wc) / kTwoPi;
      os << (l.spin == cavity::SpinBranch::Down ? 0 : 1) << ',' << m.k << ',' << io::format_double(l.detuning / kTwoPi) << ','
         << io::format_double(lo) << ',' << io::format_double(hi) << '\n';
      rows.push_back({{"k", m.k}, {"splitting_Hz", m.splitting() / kTwoPi}});
    }
    out.push_back({{"spin", cavity::branch_name(l.spin)}, {"detuning_Hz", l.detuning / kTwoPi}, {"manifolds", rows}});
  }
  Outcome o;
  o.csv = os.str();
  o.results["coupling"] = coupling_json(s);
  o.results["ladders"] = out;
  return o;
}

Outcome cmd_readout(const Params& p) {
  const auto t1 = p.optional_number("t1");
  const auto r = cavity::readout_fidelity(p.number("ton"), p.number("toff"), p.number("photons"),
                                          t1 ? *t1 : std::numeric_limits<double>::infinity(), p.number("window"));
  Outcome o;
  o.json_primary = true;
  o.results = {{"T_on", r.T_on},
               {"T_off", r.T_off},
               {"M", r.M},
               {"threshold", r.threshold},
               {"fidelity", r.fidelity},
               {"error_bright", r.error_bright},
               {"error_dark", r.error_dark},
               {"flip_penalty", r.flip_penalty}};
  return o;
}

Outcome cmd_straggle(const Params& p) {
  cavity::StragglePlacement pl;
  pl.sigma_depth = p.number("sigma");
  pl.mode_halfwidth = p.number("halfwidth");
  pl.profile = p.text("profile") == "cosine" ? cavity::ModeProfile::Cosine : cavity::ModeProfile::Gaussian;
  const auto n = p.integer("samples");
  if (n < 1000 || n > 1'000'000'000) throw ConfigError("straggle.samples: must lie in [1000, 1e9]");
  const auto seed = p.integer("seed");
  if (seed < 0) throw ConfigError("straggle.seed: must be >= 0");
  const auto s = cavity::coupling_variation(pl, static_cast<std::size_t>(n), static_cast<std::uint64_t>(seed));
  Outcome o;
  o.json_primary = true;
  o.seed = static_cast<std::uint64_t>(seed);
  const double a = kPi / (2.0 * pl.mode_halfwidth);
  o.results = {{"mean", s.mean},          {"std", s.std},
               {"std_over_mean", s.rel_std}, {"mean_stderror", s.mean_stderror},
               {"samples", s.samples},    {"gaussian_expectation", std::exp(-0.5 * a * a * pl.sigma_depth * pl.sigma_depth)}};
  return o;
}

Outcome cmd_plot(const Params& p) {
  const auto path = p.text("input");
  if (path.empty()) throw ConfigError("plot.input: a CSV path is required");
  std::ifstream in(path);
  if (!in) throw ConfigError("plot.input: cannot open '" + path + "'");
  io::CsvTable table;
  try {
    table = io::read_csv(in);
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("plot.input: malformed CSV: ") + e.what());
  }
  Outcome o;
  o.csv = render_svg(table, parse_plot_kind(p.text("kind")), p.text("title").empty() ? path : p.text("title"));
  return o;
}

std::vector<Command> build_table() {
  std::vector<Command> t;
  t.push_back({"breit-rabi", "", "breit-rabi", "transition frequencies against field (CSV)",
               concat({system_params(),
                       {num("bmin", "T", "0", "lowest field"), num("bmax", "T", "200uT", "highest field"),
                        integer("points", "201", "number of field points"),
                        text("pairs", "", "comma-separated pairs like S0-T0; empty = all from the lowest level")}}),
               cmd_breit_rabi});
  t.push_back({"clock-find", "", "clock-find", "fields where df/dB of a transition vanishes (CSV)",
               concat({system_params(),
                       {text("pair", "S0-T0", "transition, e.g. S0-T0 or T0-T+"), num("bmin", "T", "0", "search start"),
                        num("bmax", "T", "1mT", "search end"), integer("grid", "401", "bracketing grid points"),
                        num("tolerance", "", "1e6", "accepted |df/dB| in Hz/T")}}),
               cmd_clock_find});
  t.push_back({"pulse.rabi", "pulse", "rabi", "Rabi oscillation trace (CSV x,y,stderr)",
               concat({qubit_params("2.14"), noise_params("0", "0"),
                       {num("amplitude", "", "1", "drive amplitude"),
                        grid("durations", "s", "0:500us:201", "drive durations")}}),
               cmd_rabi});
  t.push_back({"pulse.ramsey", "pulse", "ramsey", "Ramsey fringes with Gaussian envelope fit",
               concat({qubit_params("2.14"), noise_params("1ms", "0"),
                       {num("detuning", "Hz", "2kHz", "deliberate detuning"),
                        grid("taus", "s", "0:3ms:61", "free evolution times")}}),
               cmd_ramsey});
  t.push_back({"pulse.hahn", "pulse", "hahn", "phase-cycled Hahn echo with T2 fit (x = 2 tau)",
               concat({qubit_params("2.14"), noise_params("1ms", "0"),
                       {grid("taus", "s", "0.05:4:40", "half echo times tau"),
                        flag("phase-cycle", "true", "difference of leading-pulse phases 0 and pi"),
                        num("offset", "", "0", "constant detector baseline added to each shot"),
                        choice("model", "stretched", {"exponential", "stretched"}, "decay model")}}),
               cmd_hahn});
  t.push_back({"pulse.cpmg", "pulse", "cpmg", "CPMG T2 against pulse count and the scaling exponent",
               concat({qubit_params("700"), noise_params("0", "0.63"),
                       {{"n", Kind::IntList, "", "1,2,4,8", "refocusing pulse counts (powers of two)", {}},
                        grid("times", "s", "0.1:10:40:log", "total free evolution times")}}),
               cmd_cpmg});
  t.push_back({"pulse.t1", "pulse", "t1", "inversion-difference T1 trace",
               concat({qubit_params("2.14"), {grid("waits", "s", "0:1800:61", "wait times")}}), cmd_t1});
  t.push_back({"pulse.tip-angle", "pulse", "tip-angle", "echo amplitude against refocusing angle",
               concat({qubit_params("2.14"),
                       {grid("thetas", "rad", "0:2pi:65", "refocusing angles"), num("tau", "s", "1ms", "half echo time")}}),
               cmd_tip_angle});
  t.push_back({"polarize", "", "polarize", "optical hyperpolarization population trace",
               {num("power", "W", "4uW", "pump power"), num("cal-tau", "s", "50ms", "calibration time constant"),
                num("cal-power", "W", "4uW", "power at which cal-tau was measured"),
                num("branch-back", "", "0", "probability of decay back to the pumped pool"),
                choice("pumped", "triplet", {"singlet", "triplet"}, "pool being emptied"),
                num("initial-singlet", "", "0.25", "initial singlet population"),
                grid("times", "s", "0:500ms:101", "time grid")},
               cmd_polarize});
  t.push_back({"spectrum.absorption", "spectrum", "absorption", "absorption spectrum with isotope side peaks",
               {num("center", "", "3448.2758620689656", "hyperfine centroid in cm^-1"),
                num("hyperfine", "Hz", "1.66GHz", "ground hyperfine constant"),
                num("fwhm", "", "0.007", "Lorentzian FWHM in cm^-1"),
                choice("state", "unpolarized", {"unpolarized", "singlet", "triplet", "custom"}, "ground populations"),
                num("singlet", "", "0.25", "singlet population when state = custom"),
                num("side-offset", "", "0.035", "76Se/78Se offset from the centroid in cm^-1"),
                num("side-strength", "", "0.02", "76Se/78Se relative strength"),
                num("span", "", "0.15", "half width of the wavenumber window in cm^-1"),
                integer("points", "3001", "grid points")},
               cmd_absorption});
  t.push_back({"spectrum.cavity", "spectrum", "cavity", "spin-dependent cavity transmission and reflection",
               concat({cavity_params(),
                       {choice("spin", "both", {"coupled", "uncoupled", "both"}, "which spin state(s) to emit"),
                        choice("uncoupled-model", "zero", {"zero", "detuned"}, "uncoupled state: no emitter or detuned emitter"),
                        num("span", "Hz", "6GHz", "probe window width"), integer("points", "4001", "grid points")}}),
               cmd_cavity_spectrum});
  t.push_back({"ladder", "", "ladder", "Jaynes-Cummings ladder for both ground-spin branches",
               concat({cavity_params(), {integer("nmax", "4", "highest excitation manifold")}}), cmd_ladder});
  t.push_back({"readout", "", "readout", "photon-counting single-shot readout fidelity (JSON)",
               {num("ton", "", "0.01", "transmission in the coupled spin state"),
                num("toff", "", "0.9", "transmission in the uncoupled spin state"),
                num("photons", "", "100", "mean incident photons per shot"),
                num("t1", "s", "", "spin lifetime; empty = no flip penalty"),
                num("window", "s", "0", "integration window")},
               cmd_readout});
  t.push_back({"straggle", "", "straggle", "coupling spread from implantation straggle (JSON)",
               {num("sigma", "m", "80nm", "depth straggle standard deviation"),
                num("halfwidth", "m", "425nm", "mode half period lambda/2n"),
                choice("profile", "cosine", {"cosine", "gaussian"}, "mode amplitude profile"),
                integer("samples", "100000", "Monte-Carlo samples"), integer("seed", "1", "random seed")},
               cmd_straggle});
  t.push_back({"plot", "", "plot", "render a CSV produced by another subcommand to SVG",
               {text("input", "", "CSV file to plot"),
                choice("kind", "auto", {"auto", "breit-rabi", "clock", "trace", "absorption", "cavity", "population", "ladder"},
                       "schema; auto detects from the header"),
                text("title", "", "plot title")},
               cmd_plot});
  return t;
}

std::string describe(const ParamSpec& s) {
  std::string d = s.help;
  if (!s.unit.empty()) d += " [" + s.unit + "]";
  d += s.default_value.empty() ? " (default: unset)" : " (default: " + s.default_value + ")";
  return d;
}

struct Leaf {
  const Command* command = nullptr;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> flags;
  std::string config_path, out_path, report_path;
};

void write_text(const std::string& path, const std::string& body, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

int execute(Leaf& leaf, std::ostream& out, std::ostream& err) {
  const auto& cmd = *leaf.command;
  Params params(cmd.section, cmd.params);
  if (!leaf.config_path.empty()) {
    std::ifstream f(leaf.config_path);
    if (!f) throw ConfigError("cannot open config '" + leaf.config_path + "'");
    Json doc;
    try {
      doc = Json::parse(f);
    } catch (const Json::parse_error& e) {
      throw ConfigError("config '" + leaf.config_path + "': " + e.what());
    }
    std::vector<std::string> sections;
    for (const auto& c : command_table()) sections.push_back(c.section);
    params.apply_document(doc, sections);
  }
  for (const auto& s : cmd.params) {
    auto* opt = leaf.app->get_option("--" + s.key);
    if (opt->count() > 0) params.apply_text(s.key, leaf.flags.at(s.key));
  }

  Outcome o = cmd.run(params);

  Json report;
  report["command"] = cmd.section;
  report["version"] = kVersion;
  report["seed"] = o.seed ? Json(*o.seed) : Json(nullptr);
  report["config"] = Json::object({{cmd.section, params.resolved()}});
  report["results"] = o.results;
  if (!o.failure.empty()) report["failure"] = o.failure;

  if (o.json_primary) write_text(leaf.out_path, o.results.dump(2) + "\n", out);
  else write_text(leaf.out_path, o.csv, out);
  if (!leaf.report_path.empty()) write_text(leaf.report_path, report.dump(2) + "\n", out);

  if (!o.failure.empty()) {
    err << "error: " << o.failure << "\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace

const std::vector<Command>& command_table() {
  static const std::vector<Command> table = build_table();
  return table;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Donor spin qubit and cavity-QED simulator", "donorqed"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::map<std::string, CLI::App*> groups;
  std::vector<std::unique_ptr<Leaf>> leaves;
  for (const auto& cmd : command_table()) {
    CLI::App* parent = &app;
    if (!cmd.group.empty()) {
      auto& g = groups[cmd.group];
      if (!g) {
        g = app.add_subcommand(cmd.group, cmd.group + " experiments");
        g->require_subcommand(1);
      }
      parent = g;
    }
    auto leaf = std::make_unique<Leaf>();
    leaf->command = &cmd;
    leaf->app = parent->add_subcommand(cmd.name, cmd.help);
    leaf->app->add_option("--config", leaf->config_path, "JSON config file (or an emitted report) to load first");
    leaf->app->add_option("--out", leaf->out_path, "primary output file (default: stdout)");
    leaf->app->add_option("--report", leaf->report_path, "JSON run report with the resolved config");
    for (const auto& s : cmd.params) {
      // Flags stand alone ("--retune") but still take "--retune=false".
      if (s.kind == Kind::Flag) leaf->app->add_flag("--" + s.key + "{true}", leaf->flags[s.key], describe(s));
      else leaf->app->add_option("--" + s.key, leaf->flags[s.key], describe(s));
    }
    leaves.push_back(std::move(leaf));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  for (auto& leaf : leaves) {
    if (!leaf->app->parsed()) continue;
    try {
      return execute(*leaf, out, err);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return kConfigError;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kConfigError;
    } catch (const std::exception& e) {
      err << "numerical failure: " << e.what() << "\n";
      return kNumericalFailure;
    }
  }
  err << "error: no subcommand given\n";
  return kConfigError;
}

}  // namespace donorqed::cli
