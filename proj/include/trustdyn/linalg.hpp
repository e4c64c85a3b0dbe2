#ifndef TRUSTDYN_LINALG_HPP_
#define TRUSTDYN_LINALG_HPP_

// Small dense real matrices (a handful of rows) for Markov chains and
// Jacobians. Not meant for anything large.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace trustdyn {

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  DenseMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// x * M for a row vector x.
std::vector<double> left_multiply(std::span<const double> x, const DenseMatrix& m);

// Solves A x = b by Gaussian elimination with partial pivoting. Throws
// SingularMatrix when a pivot falls below `pivot_tol` times the largest
// entry of A.
std::vector<double> solve_linear(DenseMatrix a, std::vector<double> b,
                                 double pivot_tol = 1e-13);

// All eigenvalues of a square real matrix: reduction to upper Hessenberg
// form by stabilized elimination, then the Francis double-shift QR
// iteration. Complex eigenvalues come out as conjugate pairs. Throws
// std::runtime_error if the iteration fails to converge.
std::vector<std::complex<double>> eigenvalues(DenseMatrix a);

}  // namespace trustdyn

#endif  // TRUSTDYN_LINALG_HPP_
