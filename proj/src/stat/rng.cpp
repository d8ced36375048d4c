#include "cohortsim/stat/rng.hpp"

#include <cmath>

#include "cohortsim/stat/normal.hpp"
#include "cohortsim/util/errors.hpp"

namespace cohortsim::stat {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed) {
  // Expand the seed through splitmix64 as recommended by the xoshiro
  // authors; guarantees a nonzero state for every seed.
  std::uint64_t sm = seed;
  s_[0] = splitmix64(sm);
  s_[1] = splitmix64(sm);
  s_[2] = splitmix64(sm);
  s_[3] = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  // Top 53 bits -> [0,1); shift into (0,1) by mapping 0 to the midpoint of
  // the lowest cell.  Keeps quantile() and log() safe without branching on
  // downstream call sites.
  const double u =
      static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-54;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw NumericError("uniform_index: n must be positive");
  // Rejection sampling on the top bits to stay unbiased.
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() { return normal_quantile(uniform01()); }

bool Rng::bernoulli(double p) { return uniform01() <= p; }

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name) {
  // FNV-1a 64 over the stream name...
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ULL;
  }
  // ...mixed with the master seed through two splitmix64 rounds.
  std::uint64_t state = master_seed ^ h;
  std::uint64_t out = splitmix64(state);
  out ^= splitmix64(state);
  return out;
}

}  // namespace cohortsim::stat
