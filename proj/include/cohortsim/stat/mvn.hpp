#pragma once

#include <cstdint>
#include <vector>

#include "cohortsim/stat/matrix.hpp"
#include "cohortsim/stat/rng.hpp"

namespace cohortsim::stat {

// Draws one multivariate-normal vector given a precomputed Cholesky factor:
// x = mean + L * z with z i.i.d. standard normal from `rng`.
std::vector<double> mvn_draw(const std::vector<double>& mean,
                             const Matrix& lower, Rng& rng);

// Draws `n` rows from N(mean, cov); result is n x dim.  The covariance is
// validated and factored once.  A zero covariance reproduces the mean
// exactly.  Deterministic for fixed seed.
Matrix mvn_sample(const std::vector<double>& mean, const Matrix& cov,
                  int n, std::uint64_t seed);

}  // namespace cohortsim::stat
