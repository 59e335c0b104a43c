#include "donorqed/spin.hpp"

#include "donorqed/constants.hpp"
#include "donorqed/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace donorqed::spin {

using cd = std::complex<double>;

int SpinSystem::nuclear_dim() const { return static_cast<int>(std::lround(2.0 * I)) + 1; }
int SpinSystem::dim() const { return 2 * nuclear_dim(); }

double SpinSystem::electron_gyro() const { return g_e * PhysicalConstants::mu_B / PhysicalConstants::h; }
double SpinSystem::nuclear_gyro() const { return g_n * PhysicalConstants::mu_N / PhysicalConstants::h; }

void SpinSystem::validate() const {
  if (!std::isfinite(g_e) || !std::isfinite(g_n) || !std::isfinite(A) || !std::isfinite(I))
    throw std::invalid_argument("spin system '" + name + "': non-finite parameter");
  if (I < 0.0 || std::abs(2.0 * I - std::round(2.0 * I)) > 1e-12)
    throw std::invalid_argument("spin system '" + name + "': I must be a non-negative half-integer");
  if (I > 10.0) throw std::invalid_argument("spin system '" + name + "': I > 10 not supported");
}

const std::vector<SpinSystem>& preset_table() {
  // g_n = mu / (I mu_N) from the bare nuclear moments.
  static const std::vector<SpinSystem> table = {
      {"77Se", 2.0057, 1.07, 0.5, 1.66e9},
      {"33S", 2.0057, 0.4292, 1.5, 312e6},
      {"123Te", 2.0057, -1.4738, 0.5, 2.90e9},
      {"125Te", 2.0057, -1.7770, 0.5, 3.50e9},
  };
  return table;
}

SpinSystem preset(std::string_view name) {
  for (const auto& p : preset_table())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : preset_table()) known += (known.empty() ? "" : ", ") + p.name;
  throw std::invalid_argument("unknown isotope '" + std::string(name) + "' (preset table: " + known + ")");
}

SpinOperators spin_operators(double j) {
  const int d = static_cast<int>(std::lround(2.0 * j)) + 1;
  ComplexMatrix plus = ComplexMatrix::Zero(d, d);
  ComplexMatrix z = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = j - k;
    z(k, k) = m;
    if (k + 1 < d) {
      const double mlow = m - 1.0;
      plus(k, k + 1) = std::sqrt(j * (j + 1.0) - mlow * (mlow + 1.0));
    }
  }
  const ComplexMatrix minus = plus.adjoint();
  SpinOperators ops;
  ops.x = 0.5 * (plus + minus);
  ops.y = cd(0.0, -0.5) * (plus - minus);
  ops.z = z;
  return ops;
}

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct CoupledOps {
  ComplexMatrix Sx, Sy, Sz, Ix, Iy, Iz;
};

CoupledOps coupled_ops(const SpinSystem& sys) {
  const auto s = spin_operators(0.5);
  const auto n = spin_operators(sys.I);
  const ComplexMatrix one_e = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix one_n = ComplexMatrix::Identity(sys.nuclear_dim(), sys.nuclear_dim());
  return {kron(s.x, one_n), kron(s.y, one_n), kron(s.z, one_n),
          kron(one_e, n.x), kron(one_e, n.y), kron(one_e, n.z)};
}

std::string fraction(double v) {
  const long twice = std::lround(2.0 * v);
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

std::string product_label(const SpinSystem& sys, int index) {
  const int nd = sys.nuclear_dim();
  const bool up = index / nd == 0;
  const double mI = sys.I - (index % nd);
  std::string e = up ? "↑" : "↓";
  if (nd == 2) return "|" + e + (mI > 0 ? "⇑" : "⇓") + "⟩";
  return "|" + e + "," + (mI >= 0 ? "+" : "") + fraction(mI) + "⟩";
}

void fill_product_labels(const SpinSystem& sys, EigenSystem& es) {
  const auto n = es.states.cols();
  es.product_labels.assign(n, {});
  es.product_weight.assign(n, 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index best = 0;
    const double w = es.states.col(k).cwiseAbs2().maxCoeff(&best);
    es.product_labels[k] = product_label(sys, static_cast<int>(best));
    es.product_weight[k] = w;
  }
}

}  // namespace

ComplexMatrix build_hamiltonian(const SpinSystem& sys, double B) {
  sys.validate();
  if (!std::isfinite(B)) throw std::invalid_argument("build_hamiltonian: non-finite field");
  const auto op = coupled_ops(sys);
  ComplexMatrix H = sys.electron_gyro() * B * op.Sz - sys.nuclear_gyro() * B * op.Iz +
                    sys.A * (op.Sx * op.Ix + op.Sy * op.Iy + op.Sz * op.Iz);
  // Symmetrise away rounding from the operator products.
  return 0.5 * (H + H.adjoint()).eval();
}

int EigenSystem::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

int EigenSystem::index_of(std::string_view label) const {
  const int i = find(label);
  if (i < 0) throw std::invalid_argument("unknown level label '" + std::string(label) + "'");
  return i;
}

std::string total_spin_label(double I, double F, double mF) {
  if (std::abs(I - 0.5) < 1e-12) {
    if (F < 0.5) return "S0";
    if (mF < -0.5) return "T-";
    if (mF > 0.5) return "T+";
    return "T0";
  }
  return "F" + fraction(F) + "m" + fraction(mF);
}

EigenSystem zero_field_eigensystem(const SpinSystem& sys) {
  sys.validate();
  const auto op = coupled_ops(sys);
  const ComplexMatrix Fx = op.Sx + op.Ix, Fy = op.Sy + op.Iy, Fz = op.Sz + op.Iz;
  const ComplexMatrix F2 = Fx * Fx + Fy * Fy + Fz * Fz;
  // F(F+1) values of the two manifolds differ by 2I+1 while m_F spans at most
  // 2I+1, so 2 F^2 + F_z has a non-degenerate spectrum.
  ComplexMatrix K = 2.0 * F2 + Fz;
  K = 0.5 * (K + K.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(K);
  const ComplexMatrix basis = solver.eigenvectors();
  const ComplexMatrix H = build_hamiltonian(sys, 0.0);

  const auto n = basis.cols();
  struct Level {
    double E, F, mF;
    Eigen::Index col;
  };
  std::vector<Level> levels;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto v = basis.col(k);
    const double f2 = (v.adjoint() * F2 * v)(0, 0).real();
    const double F = std::round(2.0 * (-1.0 + std::sqrt(1.0 + 4.0 * f2)) / 2.0) / 2.0;
    const double mF = std::round(2.0 * (v.adjoint() * Fz * v)(0, 0).real()) / 2.0;
    const double E = (v.adjoint() * H * v)(0, 0).real();
    levels.push_back({E, F, mF, k});
  }
  const double tie = 1e-9 * std::max(1.0, std::abs(sys.A));
  std::sort(levels.begin(), levels.end(), [tie](const Level& a, const Level& b) {
    if (std::abs(a.E - b.E) > tie) return a.E < b.E;
    if (a.F != b.F) return a.F < b.F;
    return a.mF < b.mF;
  });

  EigenSystem es;
  es.B = 0.0;
  es.energies.resize(n);
  es.states.resize(n, n);
  es.labels.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    es.energies(k) = levels[k].E;
    es.states.col(k) = basis.col(levels[k].col);
    es.labels[k] = total_spin_label(sys.I, levels[k].F, levels[k].mF);
  }
  fill_product_labels(sys, es);
  return es;
}

namespace {

// One continuation step: diagonalise at B and inherit labels from `prev`.
EigenSystem step_to(const SpinSystem& sys, const EigenSystem& prev, double B) {
  const ComplexMatrix H = build_hamiltonian(sys, B);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H);
  const Eigen::VectorXd E = solver.eigenvalues();
  const ComplexMatrix V = solver.eigenvectors();
  const auto n = V.cols();

  const Eigen::MatrixXd overlap = (prev.states.adjoint() * V).cwiseAbs2();
  struct Cand {
    double o;
    Eigen::Index i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cands.push_back({overlap(i, j), i, j});
  // Largest overlap first; ties go to the pairing that preserves energy order.
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (std::abs(a.o - b.o) > 1e-9) return a.o > b.o;
    const auto da = std::abs(a.i - a.j), db = std::abs(b.i - b.j);
    if (da != db) return da < db;
    return a.i < b.i;
  });

  std::vector<char> used_prev(n, 0), used_cur(n, 0);
  std::vector<std::string> labels(n);
  for (const auto& c : cands) {
    if (used_prev[c.i] || used_cur[c.j]) continue;
    used_prev[c.i] = used_cur[c.j] = 1;
    labels[c.j] = prev.labels[c.i];
  }

  EigenSystem es;
  es.B = B;
  es.energies = E;
  es.states = V;
  es.labels = std::move(labels);
  fill_product_labels(sys, es);
  return es;
}

}  // namespace

EigenSystem continue_eigensystem(const SpinSystem& sys, const EigenSystem& from, double B,
                                 double max_step) {
  if (!std::isfinite(B)) throw std::invalid_argument("eigensystem: non-finite field");
  const double span = B - from.B;
  if (span == 0.0) return from;
  if (!(max_step > 0.0)) throw std::invalid_argument("eigensystem: max_step must be positive");
  const auto steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / max_step - 1e-9)));
  EigenSystem cur = from;
  for (long s = 1; s <= steps; ++s) {
    const double Bs = (s == steps) ? B : from.B + span * static_cast<double>(s) / static_cast<double>(steps);
    // At B = 0 the triplet is degenerate; labels are defined by total spin there.
    cur = Bs == 0.0 ? zero_field_eigensystem(sys) : step_to(sys, cur, Bs);
  }
  return cur;
}

EigenSystem eigensystem(const SpinSystem& sys, double B) {
  if (!std::isfinite(B)) throw std::invalid_argument("eigensystem: non-finite field");
  const EigenSystem zero = zero_field_eigensystem(sys);
  if (B == 0.0) return zero;
  return continue_eigensystem(sys, zero, B, 0.01 * std::abs(B));
}

std::vector<std::string> level_labels(const SpinSystem& sys) { return zero_field_eigensystem(sys).labels; }

TransitionPair parse_pair(std::string_view text, const SpinSystem& sys) {
  const auto labels = level_labels(sys);
  auto known = [&](std::string_view s) { return std::find(labels.begin(), labels.end(), s) != labels.end(); };
  for (std::size_t pos = text.find('-'); pos != std::string_view::npos; pos = text.find('-', pos + 1)) {
    const auto a = text.substr(0, pos), b = text.substr(pos + 1);
    if (known(a) && known(b) && a != b) return {std::string(a), std::string(b)};
  }
  std::string all;
  for (const auto& l : labels) all += (all.empty() ? "" : " ") + l;
  throw std::invalid_argument("invalid transition '" + std::string(text) + "' (levels: " + all + ")");
}

std::vector<TransitionPair> parse_pairs(std::string_view comma_list, const SpinSystem& sys) {
  std::vector<TransitionPair> out;
  std::size_t start = 0;
  while (start <= comma_list.size()) {
    const auto end = std::min(comma_list.find(',', start), comma_list.size());
    const auto item = comma_list.substr(start, end - start);
    if (!item.empty()) out.push_back(parse_pair(item, sys));
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("no transitions given");
  return out;
}

std::vector<Transition> transition_frequencies(const EigenSystem& es, std::span<const TransitionPair> pairs) {
  std::vector<Transition> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const double f = std::abs(es.energies(es.index_of(p.second)) - es.energies(es.index_of(p.first)));
    out.push_back({p, f});
  }
  return out;
}

std::vector<Transition> transition_frequencies(const SpinSystem& sys, double B,
                                               std::span<const TransitionPair> pairs) {
  return transition_frequencies(eigensystem(sys, B), pairs);
}

void SweepTable::write_csv(std::ostream& os) const {
  os << "B_T";
  for (const auto& p : pairs) os << ',' << p.name() << "_Hz";
  os << '\n';
  for (std::size_t r = 0; r < B.size(); ++r) {
    os << io::format_double(B[r]);
    for (double f : frequencies[r]) os << ',' << io::format_double(f);
    os << '\n';
  }
}

SweepTable field_sweep(const SpinSystem& sys, double B_min, double B_max, int n_points,
                       std::span<const TransitionPair> pairs) {
  if (!std::isfinite(B_min) || !std::isfinite(B_max) || !(B_min < B_max))
    throw std::invalid_argument("field_sweep: need finite B_min < B_max");
  if (n_points < 2) throw std::invalid_argument("field_sweep: n_points must be >= 2");
  if (pairs.empty()) throw std::invalid_argument("field_sweep: no transitions requested");

  SweepTable table;
  table.pairs.assign(pairs.begin(), pairs.end());
  const double max_step = 0.01 * (B_max - B_min);
  EigenSystem es = eigensystem(sys, B_min);
  for (int k = 0; k < n_points; ++k) {
    const double B = (k == n_points - 1) ? B_max : B_min + (B_max - B_min) * k / (n_points - 1);
    es = continue_eigensystem(sys, es, B, max_step);
    std::vector<double> row;
    for (const auto& t : transition_frequencies(es, pairs)) row.push_back(t.frequency);
    table.B.push_back(B);
    table.frequencies.push_back(std::move(row));
  }
  return table;
}

double clock_d1_step(double B) { return std::max(1e-9, 1e-6 * std::abs(B)); }
double clock_d2_step(double B) { return std::max(1e-6, 1e-3 * std::abs(B)); }

namespace {

struct PairProbe {
  const SpinSystem& sys;
  TransitionPair pair;
  double max_step;

  double frequency(const EigenSystem& es) const {
    return std::abs(es.energies(es.index_of(pair.second)) - es.energies(es.index_of(pair.first)));
  }
  double at(const EigenSystem& ref, double B) const {
    return frequency(continue_eigensystem(sys, ref, B, max_step));
  }
  double d1(const EigenSystem& ref, double B) const {
    const double h = clock_d1_step(B);
    return (at(ref, B + h) - at(ref, B - h)) / (2.0 * h);
  }
};

}  // namespace

std::vector<ClockPoint> find_clock_transition(const SpinSystem& sys, const TransitionPair& pair,
                                              double B_min, double B_max,
                                              const ClockSearchOptions& options) {
  if (!std::isfinite(B_min) || !std::isfinite(B_max) || !(B_min < B_max))
    throw std::invalid_argument("find_clock_transition: need finite B_min < B_max");
  if (options.grid_points < 3) throw std::invalid_argument("find_clock_transition: grid_points must be >= 3");
  {
    const auto labels = level_labels(sys);
    for (const auto& l : {pair.first, pair.second})
      if (std::find(labels.begin(), labels.end(), l) == labels.end())
        throw std::invalid_argument("find_clock_transition: unknown level '" + l + "'");
  }

  const double span = B_max - B_min;
  const PairProbe probe{sys, pair, 0.01 * span};
  const int n = options.grid_points;
  const double spacing = span / (n - 1);

  std::vector<double> grid(n), d1(n);
  std::vector<EigenSystem> es(n);
  es[0] = eigensystem(sys, B_min);
  for (int k = 0; k < n; ++k) {
    grid[k] = (k == n - 1) ? B_max : B_min + span * k / (n - 1);
    if (k > 0) es[k] = continue_eigensystem(sys, es[k - 1], grid[k], probe.max_step);
    d1[k] = probe.d1(es[k], grid[k]);
  }

  std::vector<ClockPoint> found;
  auto accept = [&](const EigenSystem& ref, double B) {
    ClockPoint cp;
    cp.B = B;
    cp.d1_step = clock_d1_step(B);
    cp.d2_step = clock_d2_step(B);
    cp.d1 = probe.d1(ref, B);
    if (std::abs(cp.d1) >= options.d1_tolerance) return;
    cp.f = probe.at(ref, B);
    // A kink in |E_a - E_b| (level crossing) also zeroes the centred difference.
    const double h1 = cp.d1_step;
    if (std::abs(probe.at(ref, B + h1) - cp.f) / h1 >= options.d1_tolerance ||
        std::abs(cp.f - probe.at(ref, B - h1)) / h1 >= options.d1_tolerance)
      return;
    const double h2 = cp.d2_step;
    cp.d2 = (probe.at(ref, B + h2) - 2.0 * cp.f + probe.at(ref, B - h2)) / (h2 * h2);
    for (const auto& prior : found)
      if (std::abs(prior.B - B) < 2.0 * spacing) return;
    found.push_back(cp);
  };

  auto sign_change = [&](int k) { return k >= 0 && k + 1 < n && ((d1[k] < 0.0) != (d1[k + 1] < 0.0)); };

  for (int k = 0; k + 1 < n; ++k) {
    if (!sign_change(k)) continue;
    double lo = grid[k], hi = grid[k + 1];
    double dlo = d1[k];
    const double tol = std::max(1e-12, 1e-12 * std::max(std::abs(lo), std::abs(hi)));
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double dm = probe.d1(es[k], mid);
      if (dm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((dm < 0.0) == (dlo < 0.0)) {
        lo = mid;
        dlo = dm;
      } else {
        hi = mid;
      }
    }
    accept(es[k], 0.5 * (lo + hi));
  }

  // Touching zeros without a sign change (e.g. an even f at a range end):
  // a grid-local minimum of |d1| below tolerance.
  for (int k = 0; k < n; ++k) {
    if (sign_change(k - 1) || sign_change(k)) continue;
    const double a = std::abs(d1[k]);
    if (a >= options.d1_tolerance) continue;
    if ((k > 0 && std::abs(d1[k - 1]) < a) || (k + 1 < n && std::abs(d1[k + 1]) < a)) continue;
    accept(es[k], grid[k]);
  }

  std::sort(found.begin(), found.end(), [](const ClockPoint& a, const ClockPoint& b) { return a.B < b.B; });
  return found;
}

}  // namespace donorqed::spin
