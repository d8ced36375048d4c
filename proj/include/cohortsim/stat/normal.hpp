#pragma once

namespace cohortsim::stat {

// Standard normal density.
double normal_pdf(double x);

// Standard normal CDF, computed as 0.5 * erfc(-x / sqrt(2)).  Accurate to
// better than 1e-12 absolute error over the real line.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF) for p in (0, 1).  A rational
// approximation provides the starting point and one Newton step against
// normal_cdf polishes it; round-trips with normal_cdf to ~1e-12 away from
// the extreme tails.  Throws NumericError for p outside (0, 1) or
// non-finite p.
double normal_quantile(double p);

}  // namespace cohortsim::stat
