#pragma once

#include <cstddef>
#include <vector>

namespace cohortsim::stat {

// Minimal dense row-major matrix.  The library needs only small, dense
// linear algebra (covariances, Newton steps), so this stays deliberately
// tiny instead of pulling in a full linear-algebra dependency.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v);

// Validates that `cov` is a finite, symmetric (within `tol`) square matrix;
// throws NumericError otherwise.
void validate_covariance(const Matrix& cov, double tol = 1e-8);

// Lower-triangular Cholesky factor of a symmetric positive semi-definite
// matrix.  Slightly negative pivots (>= -1e-10, numerical noise) are clamped
// to zero and the rest of that column zeroed, so exactly singular
// covariances factor cleanly; pivots below -1e-10 raise NumericError.  When
// `clamped_pivots` is non-null the number of clamped pivots is reported
// there for diagnostics.
Matrix cholesky_factor(const Matrix& cov, int* clamped_pivots = nullptr);

// Solves L * L^T * x = b given a Cholesky factor with strictly positive
// diagonal; throws NumericError if the factor is singular.
std::vector<double> cholesky_solve(const Matrix& lower,
                                   const std::vector<double>& b);

// Convenience: solve A x = b for symmetric positive definite A.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b);

}  // namespace cohortsim::stat
