#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cohortsim::stat {

// splitmix64 step: advances `state` and returns the next output.  Used both
// as a seed expander and as the mixing function for named sub-streams.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic, platform-independent RNG (xoshiro256++).  All stochastic
// code in the library draws through this type; std:: distributions are
// avoided on purpose because their streams differ across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in (0, 1): 53-bit mantissa, zero excluded so that the
  // result is always a valid copula/quantile argument.
  double uniform01();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n must be positive.  Unbiased via rejection.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via the inverse-CDF transform of uniform01().  Chosen
  // over Box-Muller/ziggurat so that normal draws are a pure function of the
  // uniform stream and therefore bit-identical everywhere.
  double normal();

  // Bernoulli draw.
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

// Derives the seed of a named sub-stream from a master seed.  The stream
// name is hashed (FNV-1a 64) and mixed with the master seed through
// splitmix64; distinct names give statistically independent streams and the
// mapping is stable across platforms and releases.  Convention used by the
// library: "run-<k>" for per-run streams, "patient-<i>" below a run stream,
// plus purpose-named streams like "fit-jitter".
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name);

}  // namespace cohortsim::stat
