#include "donorqed/parallel.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

namespace donorqed {

namespace {

int requested_cap() {
  const char* env = std::getenv(kThreadsEnvVar);
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 0;
  return static_cast<int>(v);
}

}  // namespace

void apply_thread_cap() {
  const int cap = requested_cap();
  if (cap > 0 && omp_get_max_threads() > cap) omp_set_num_threads(cap);
}

int worker_count() {
  apply_thread_cap();
  return omp_get_max_threads();
}

double SplitMix64::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ 0x5851F42D4C957F2DULL);
  const std::uint64_t base = mix();
  SplitMix64 scramble(base + 0x9E3779B97F4A7C15ULL * (index + 1));
  return SplitMix64(scramble());
}

}  // namespace donorqed
