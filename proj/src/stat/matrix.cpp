#include "cohortsim/stat/matrix.hpp"

#include <cmath>
#include <string>

#include "cohortsim/util/errors.hpp"

namespace cohortsim::stat {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw NumericError("matrix multiply: shape mismatch");
  Matrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) {
      const double v = at(r, k);
      if (v == 0.0) continue;
      for (int c = 0; c < rhs.cols_; ++c) out.at(r, c) += v * rhs.at(k, c);
    }
  }
  return out;
}

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v) {
  if (static_cast<std::size_t>(m.cols()) != v.size()) {
    throw NumericError("mat_vec: shape mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(m.rows()), 0.0);
  for (int r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (int c = 0; c < m.cols(); ++c) acc += m.at(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

void validate_covariance(const Matrix& cov, double tol) {
  if (cov.rows() != cov.cols()) {
    throw NumericError("covariance must be square");
  }
  for (int i = 0; i < cov.rows(); ++i) {
    for (int j = 0; j < cov.cols(); ++j) {
      const double v = cov.at(i, j);
      if (!std::isfinite(v)) throw NumericError("covariance has non-finite entry");
      const double scale =
          std::max({1.0, std::fabs(v), std::fabs(cov.at(j, i))});
      if (std::fabs(v - cov.at(j, i)) > tol * scale) {
        throw NumericError("covariance is not symmetric");
      }
    }
  }
}

Matrix cholesky_factor(const Matrix& cov, int* clamped_pivots) {
  validate_covariance(cov);
  const int n = cov.rows();
  Matrix lower(n, n);
  int clamped = 0;
  for (int j = 0; j < n; ++j) {
    double d = cov.at(j, j);
    for (int k = 0; k < j; ++k) d -= lower.at(j, k) * lower.at(j, k);
    if (d < -1e-10) {
      throw NumericError("cholesky: matrix is not positive semi-definite (pivot " +
                         std::to_string(d) + " at column " + std::to_string(j) +
                         ")");
    }
    if (d <= 0.0) {
      // Semi-definite direction: zero pivot, zero column.
      ++clamped;
      continue;
    }
    const double root = std::sqrt(d);
    lower.at(j, j) = root;
    for (int i = j + 1; i < n; ++i) {
      double s = cov.at(i, j);
      for (int k = 0; k < j; ++k) s -= lower.at(i, k) * lower.at(j, k);
      lower.at(i, j) = s / root;
    }
  }
  if (clamped_pivots != nullptr) *clamped_pivots = clamped;
  return lower;
}

std::vector<double> cholesky_solve(const Matrix& lower,
                                   const std::vector<double>& b) {
  const int n = lower.rows();
  if (static_cast<std::size_t>(n) != b.size()) {
    throw NumericError("cholesky_solve: shape mismatch");
  }
  std::vector<double> y(b);
  for (int i = 0; i < n; ++i) {
    const double d = lower.at(i, i);
    if (d <= 0.0) throw NumericError("cholesky_solve: singular factor");
    double s = y[i];
    for (int k = 0; k < i; ++k) s -= lower.at(i, k) * y[k];
    y[i] = s / d;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= lower.at(k, i) * y[k];
    y[i] = s / lower.at(i, i);
  }
  return y;
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
  return cholesky_solve(cholesky_factor(a), b);
}

}  // namespace cohortsim::stat
