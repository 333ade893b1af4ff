#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "consensus/errors.hpp"

namespace consensus {

using Vector = std::vector<double>;

/// Numeric thresholds shared by every operation.
///
/// `zero_tol` decides when a pivot or an entry counts as zero, `conv_tol` is
/// the stopping threshold for iterations and residual checks, and `max_iter`
/// bounds every iterative loop.
struct ToleranceConfig {
  double zero_tol = 1e-9;
  double conv_tol = 1e-10;
  std::size_t max_iter = 10'000;

  /// Throws Error(InvalidTolerance) unless every field is strictly positive.
  void validate() const;
};

/// Dense row-major real matrix. Never empty, every entry finite at
/// construction from external data.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix column_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  DenseMatrix transpose() const;
  double trace() const;
  /// Largest absolute entry.
  double max_abs() const;
  /// Induced infinity norm (maximum absolute row sum).
  double norm_inf() const;
  /// Frobenius (Euclidean) norm.
  double norm_frobenius() const;
  Vector row_sums() const;

  /// Submatrix with the given rows and columns, in the order given.
  DenseMatrix select(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;

  friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator*(double s, const DenseMatrix& a);
  friend Vector operator*(const DenseMatrix& a, std::span<const double> x);
  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Largest absolute entrywise difference; shapes must match.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
/// Matrices placed side by side; row counts must agree.
DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b);

class StochasticMatrix;

/// Checks squareness, nonnegativity and unit row sums (within zero_tol).
StochasticMatrix validate_stochastic(const DenseMatrix& m, const ToleranceConfig& tol = {});

/// Validated row-stochastic square matrix (the influence matrix P).
class StochasticMatrix {
 public:
  const DenseMatrix& matrix() const noexcept { return m_; }
  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  explicit StochasticMatrix(DenseMatrix m) : m_(std::move(m)) {}
  friend StochasticMatrix validate_stochastic(const DenseMatrix& m, const ToleranceConfig& tol);

  DenseMatrix m_;
};

/// Numerical rank by Gaussian elimination with partial pivoting; pivots
/// with magnitude at or below zero_tol count as zero.
std::size_t rank_with_tolerance(const DenseMatrix& m, const ToleranceConfig& tol = {});

/// Gauss-Jordan inverse. Throws Error(Singular) on a pivot below zero_tol.
DenseMatrix invert(const DenseMatrix& m, const ToleranceConfig& tol = {});

/// U+ = (U^T U)^-1 U^T for U of full column rank; Error(RankDeficient) otherwise.
DenseMatrix pseudo_inverse_full_column_rank(const DenseMatrix& u, const ToleranceConfig& tol = {});

double determinant(const DenseMatrix& m);

/// (-1)^(i+j) times the minor with row i and column j removed. The cofactor
/// of a 1x1 matrix is 1.
double cofactor(const DenseMatrix& m, std::size_t i, std::size_t j);

}  // namespace consensus
