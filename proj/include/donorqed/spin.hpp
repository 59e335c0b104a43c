#pragma once

// Ground-state spin Hamiltonian of a singly-ionised chalcogen donor:
//   H/h = (g_e mu_B / h) B S_z - (g_n mu_N / h) B I_z + A S.I
// Everything in this module is expressed in Hz.

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace donorqed::spin {

using ComplexMatrix = Eigen::MatrixXcd;

struct SpinSystem {
  std::string name;
  double g_e = 2.0057;
  double g_n = 1.07;
  double I = 0.5;       // nuclear spin quantum number
  double A = 1.66e9;    // hyperfine constant, Hz

  int nuclear_dim() const;  // 2I + 1
  int dim() const;          // 2 (2I + 1)

  double electron_gyro() const;  // g_e mu_B / h, Hz/T
  double nuclear_gyro() const;   // g_n mu_N / h, Hz/T

  /// Throws std::invalid_argument on a non-physical parameter set.
  void validate() const;
};

/// Embedded preset table (77Se+, 33S+, 123Te+, 125Te+). Only A and I are
/// measured donor values; g_n comes from the tabulated bare nuclear moments
/// and g_e = 2.0057 is reused for every species.
const std::vector<SpinSystem>& preset_table();

/// Look up a preset by name ("77Se", "33S", "123Te", "125Te"). Throws
/// std::invalid_argument naming the available presets when not found.
SpinSystem preset(std::string_view name);

inline SpinSystem selenium77() { return preset("77Se"); }

/// Hermitian Hamiltonian in the |m_S, m_I> product basis (electron index
/// major, m descending), in Hz.
ComplexMatrix build_hamiltonian(const SpinSystem& sys, double B);

/// Spin operators (S_x, S_y, S_z) for spin quantum number j, m descending.
struct SpinOperators {
  ComplexMatrix x, y, z;
};
SpinOperators spin_operators(double j);

struct EigenSystem {
  double B = 0.0;
  Eigen::VectorXd energies;     // Hz, ascending
  ComplexMatrix states;         // column k belongs to energies(k)
  std::vector<std::string> labels;           // adiabatic labels from B = 0
  std::vector<std::string> product_labels;   // dominant |m_S, m_I> component
  std::vector<double> product_weight;        // |<product|state>|^2 of it

  /// Index of a label, or -1.
  int find(std::string_view label) const;
  /// Index of a label; throws std::invalid_argument when absent.
  int index_of(std::string_view label) const;
};

/// Label of the zero-field total-spin state (F, m_F). For I = 1/2 this is
/// S0 / T- / T0 / T+; otherwise "F<F>m<mF>".
std::string total_spin_label(double I, double F, double mF);

/// All labels for a system in zero-field order.
std::vector<std::string> level_labels(const SpinSystem& sys);

/// Zero-field eigensystem in the total-spin (F, m_F) basis.
EigenSystem zero_field_eigensystem(const SpinSystem& sys);

/// Continue labels from `from` to field B with steps of at most `max_step`,
/// matching eigenvectors by maximal overlap between neighbouring fields.
EigenSystem continue_eigensystem(const SpinSystem& sys, const EigenSystem& from, double B,
                                 double max_step);

/// Dense diagonalisation at B with labels continued from B = 0 in steps of
/// at most 1% of |B|.
EigenSystem eigensystem(const SpinSystem& sys, double B);

struct TransitionPair {
  std::string first;
  std::string second;
  std::string name() const { return first + "-" + second; }
  bool operator==(const TransitionPair&) const = default;
};

/// Parse "S0-T0" style pair names. Labels may themselves contain '-'
/// ("S0-T-"), so every split point is tried against the system's labels.
TransitionPair parse_pair(std::string_view text, const SpinSystem& sys);
std::vector<TransitionPair> parse_pairs(std::string_view comma_list, const SpinSystem& sys);

struct Transition {
  TransitionPair pair;
  double frequency = 0.0;  // Hz, > 0
};

std::vector<Transition> transition_frequencies(const EigenSystem& es,
                                               std::span<const TransitionPair> pairs);
std::vector<Transition> transition_frequencies(const SpinSystem& sys, double B,
                                               std::span<const TransitionPair> pairs);

struct SweepTable {
  std::vector<TransitionPair> pairs;
  std::vector<double> B;
  std::vector<std::vector<double>> frequencies;  // [row][pair]

  /// Header `B_T,<pair>_Hz,...`, shortest round-trip scientific floats.
  void write_csv(std::ostream& os) const;
};

SweepTable field_sweep(const SpinSystem& sys, double B_min, double B_max, int n_points,
                       std::span<const TransitionPair> pairs);

struct ClockPoint {
  double B = 0.0;        // T
  double f = 0.0;        // Hz
  double d1 = 0.0;       // Hz/T
  double d2 = 0.0;       // Hz/T^2
  double d1_step = 0.0;  // T
  double d2_step = 0.0;  // T
};

struct ClockSearchOptions {
  int grid_points = 401;
  double d1_tolerance = 1e6;  // Hz/T, i.e. 1 Hz/uT
};

/// Derivative step used for df/dB: max(1 nT, 1e-6 |B|).
double clock_d1_step(double B);
/// Step used for d2f/dB2: max(1 uT, 1e-3 |B|).
double clock_d2_step(double B);

/// Every field in [B_min, B_max] where df/dB of the pair vanishes.
std::vector<ClockPoint> find_clock_transition(const SpinSystem& sys, const TransitionPair& pair,
                                              double B_min, double B_max,
                                              const ClockSearchOptions& options = {});

}  // namespace donorqed::spin
