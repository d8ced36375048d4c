#pragma once

#include <vector>

#include "cohortsim/stat/rng.hpp"

namespace cohortsim::stat {

// Kendall's tau-b (tie corrected).  Exact O(n^2) pair enumeration; sample
// sizes in this library stay small enough that the quadratic cost is
// irrelevant next to model fitting.  A constant input leaves the
// correlation undefined and raises NumericError.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// Two-sample Kolmogorov-Smirnov statistic: sup_x |F_a(x) - F_b(x)|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Empirical margin of a continuous column.  cdf uses the rank/(n+1)
// convention so probabilities stay strictly inside (0,1); pseudo_inverse is
// the step-function inverse clamped to the observed range, hence
// back-transformed samples only take values present in the fitted data.
class EmpiricalMargin {
 public:
  EmpiricalMargin() = default;
  explicit EmpiricalMargin(std::vector<double> values);

  double cdf(double x) const;
  double pseudo_inverse(double u) const;
  const std::vector<double>& sorted_values() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// Rank-based pseudo-observations u_i = rank_i/(n+1), ranks 1..n.  Tied
// blocks get their ranks in seeded-random order when `jitter_rng` is given
// (required for categorical columns, where whole levels are tied); with a
// null rng ties break deterministically by row order.
std::vector<double> pseudo_observations(const std::vector<double>& values,
                                        Rng* jitter_rng = nullptr);

}  // namespace cohortsim::stat
