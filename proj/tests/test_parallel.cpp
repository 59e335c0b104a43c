#include "doctest.h"

#include "donorqed/cavity.hpp"
#include "donorqed/coherence/experiments.hpp"
#include "donorqed/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <set>

using namespace donorqed;

TEST_CASE("substreams are reproducible and distinct") {
  auto a = substream(42, 7), b = substream(42, 7), c = substream(42, 8), d = substream(43, 7);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(substream(1, i)());
  CHECK(seen.size() == 10000);
  SplitMix64 u(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
  }
}

TEST_CASE("serial and parallel ensembles are bit-identical") {
  coherence::NoiseModel noise;
  noise.S0 = 0.63;
  noise.sigma_qs = 20.0;
  noise.seed = 99;
  const auto seq = coherence::cpmg_sequence(4, 3.0);
  const auto s = coherence::evolve(coherence::QubitModel{}, seq, noise, 1000, Exec::Serial);
  const auto p = coherence::evolve(coherence::QubitModel{}, seq, noise, 1000, Exec::Parallel);
  CHECK(s.mean == p.mean);
  CHECK(s.stderror == p.stderror);

  const double taus[] = {0.0, 1e-3, 2e-3};
  const auto rs = coherence::ramsey_experiment(coherence::QubitModel{}, 1000.0, taus, noise, {300, Exec::Serial});
  const auto rp = coherence::ramsey_experiment(coherence::QubitModel{}, 1000.0, taus, noise, {300, Exec::Parallel});
  CHECK(rs.y == rp.y);
  CHECK(rs.stderror == rp.stderror);

  cavity::StragglePlacement pl;
  const auto cs = cavity::coupling_variation(pl, 50000, 5, Exec::Serial);
  const auto cp = cavity::coupling_variation(pl, 50000, 5, Exec::Parallel);
  CHECK(cs.mean == cp.mean);
  CHECK(cs.std == cp.std);
}

TEST_CASE("thread cap from the environment") {
  const int before = omp_get_max_threads();
  ::setenv(kThreadsEnvVar, "1", 1);
  CHECK(worker_count() == 1);
  // Still deterministic under the cap.
  cavity::StragglePlacement pl;
  CHECK(cavity::coupling_variation(pl, 2000, 1).mean == cavity::coupling_variation(pl, 2000, 1, Exec::Serial).mean);
  ::setenv(kThreadsEnvVar, "junk", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv(kThreadsEnvVar);
  omp_set_num_threads(before);
}
