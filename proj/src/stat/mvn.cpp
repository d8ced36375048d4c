#include "cohortsim/stat/mvn.hpp"

#include "cohortsim/util/errors.hpp"

namespace cohortsim::stat {

std::vector<double> mvn_draw(const std::vector<double>& mean,
                             const Matrix& lower, Rng& rng) {
  const int d = lower.rows();
  if (mean.size() != static_cast<std::size_t>(d)) {
    throw NumericError("mvn_draw: mean/factor dimension mismatch");
  }
  std::vector<double> z(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) z[i] = rng.normal();
  std::vector<double> x(mean);
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int k = 0; k <= i; ++k) acc += lower.at(i, k) * z[k];
    x[i] += acc;
  }
  return x;
}

Matrix mvn_sample(const std::vector<double>& mean, const Matrix& cov, int n,
                  std::uint64_t seed) {
  if (n < 0) throw NumericError("mvn_sample: negative sample count");
  const int d = cov.rows();
  if (mean.size() != static_cast<std::size_t>(d)) {
    throw NumericError("mvn_sample: mean/cov dimension mismatch");
  }
  const Matrix lower = cholesky_factor(cov);
  Rng rng(seed);
  Matrix out(n, d);
  for (int r = 0; r < n; ++r) {
    const std::vector<double> x = mvn_draw(mean, lower, rng);
    for (int c = 0; c < d; ++c) out.at(r, c) = x[c];
  }
  return out;
}

}  // namespace cohortsim::stat
