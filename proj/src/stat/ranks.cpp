#include "cohortsim/stat/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cohortsim/util/errors.hpp"

namespace cohortsim::stat {

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw NumericError("kendall_tau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw NumericError("kendall_tau: need at least two observations");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw NumericError("kendall_tau: non-finite input");
    }
  }
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1);
  const double denom_x = n0 - static_cast<double>(ties_x);
  const double denom_y = n0 - static_cast<double>(ties_y);
  if (denom_x <= 0.0 || denom_y <= 0.0) {
    throw NumericError("kendall_tau: undefined for a constant input");
  }
  return static_cast<double>(concordant - discordant) /
         std::sqrt(denom_x * denom_y);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw NumericError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

EmpiricalMargin::EmpiricalMargin(std::vector<double> values)
    : sorted_(std::move(values)) {
  if (sorted_.empty()) throw NumericError("EmpiricalMargin: empty sample");
  for (double v : sorted_) {
    if (!std::isfinite(v)) throw NumericError("EmpiricalMargin: non-finite value");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalMargin::cdf(double x) const {
  const auto upper = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  const auto count = static_cast<double>(upper - sorted_.begin());
  return count / (static_cast<double>(sorted_.size()) + 1.0);
}

double EmpiricalMargin::pseudo_inverse(double u) const {
  const auto n = static_cast<long long>(sorted_.size());
  // Index of the smallest sample value whose cdf reaches u.  The small fuzz
  // keeps cdf/pseudo_inverse round trips exact despite the u*(n+1)
  // multiplication not being exactly invertible in floating point.
  const double r = u * (static_cast<double>(n) + 1.0);
  long long idx = static_cast<long long>(std::ceil(r - 1e-9)) - 1;
  idx = std::max(0LL, std::min(n - 1, idx));
  return sorted_[static_cast<std::size_t>(idx)];
}

std::vector<double> pseudo_observations(const std::vector<double>& values,
                                        Rng* jitter_rng) {
  const std::size_t n = values.size();
  if (n == 0) throw NumericError("pseudo_observations: empty sample");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values[a] < values[b];
                   });
  std::vector<double> u(n);
  const double denom = static_cast<double>(n) + 1.0;
  std::size_t block_start = 0;
  while (block_start < n) {
    std::size_t block_end = block_start + 1;
    while (block_end < n &&
           values[order[block_end]] == values[order[block_start]]) {
      ++block_end;
    }
    if (jitter_rng != nullptr && block_end - block_start > 1) {
      // Shuffle rank assignment inside the tied block (Fisher-Yates).
      std::vector<std::size_t> block(order.begin() + block_start,
                                     order.begin() + block_end);
      for (std::size_t k = block.size() - 1; k > 0; --k) {
        const std::size_t j =
            static_cast<std::size_t>(jitter_rng->uniform_index(k + 1));
        std::swap(block[k], block[j]);
      }
      std::copy(block.begin(), block.end(), order.begin() + block_start);
    }
    for (std::size_t k = block_start; k < block_end; ++k) {
      u[order[k]] = static_cast<double>(k + 1) / denom;
    }
    block_start = block_end;
  }
  return u;
}

}  // namespace cohortsim::stat
