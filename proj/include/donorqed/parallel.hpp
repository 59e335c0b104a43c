#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace donorqed {

/// Execution policy for the data-parallel kernels. `Serial` is the reference
/// path kept for testing and benchmarking; both paths produce bit-identical
/// results because every work item owns its own output slot and reductions
/// are done afterwards in index order.
enum class Exec { Serial, Parallel };

/// Environment variable that caps the number of OpenMP workers.
inline constexpr const char* kThreadsEnvVar = "DONORQED_NUM_THREADS";

/// Number of workers the parallel path will use (>= 1).
int worker_count();

/// Apply the cap from DONORQED_NUM_THREADS, if set. Called lazily by the
/// kernels; safe to call repeatedly.
void apply_thread_cap();

template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  apply_thread_cap();
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

/// Counter-based 64-bit generator (SplitMix64). Cheap to construct, so every
/// trajectory/sample gets its own stream derived from (seed, index).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal();

 private:
  std::uint64_t state_;
};

/// Independent stream for work item `index` under `seed`.
SplitMix64 substream(std::uint64_t seed, std::uint64_t index);

}  // namespace donorqed
