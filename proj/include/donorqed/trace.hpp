#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace donorqed {

/// Simulated x-y result of an experiment. `stderror` is the Monte-Carlo
/// standard error of each y value (zero for deterministic traces).
struct SignalTrace {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> stderror;

  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t trajectories = 0;

  std::size_t size() const { return x.size(); }

  /// `x,y,stderr` CSV.
  void write_csv(std::ostream& os) const;
};

}  // namespace donorqed
