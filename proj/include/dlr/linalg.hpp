#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlr {

using Vector = std::vector<double>;

/// Small dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  /// max |A_ij - A_ji|
  double asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  Vector values;    // ascending
  Matrix vectors;   // column j pairs with values[j]
  int sweeps = 0;
};

struct JacobiOptions {
  double tolerance = 1e-10;       // Frobenius norm of the off-diagonal part
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-8;
};

/// Cyclic Jacobi rotations. Throws dlr::Error for non-square or asymmetric
/// input and when the sweep budget runs out before the off-diagonal norm
/// drops below tolerance.
SymmetricEigen jacobi_eigen(const Matrix& a, const JacobiOptions& opts = {});

}  // namespace dlr
