#include "consensus/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace consensus {

void ToleranceConfig::validate() const {
  if (!(zero_tol > 0.0) || !(conv_tol > 0.0) || max_iter == 0) {
    std::ostringstream os;
    os << "tolerances must be strictly positive (zero_tol=" << zero_tol
       << ", conv_tol=" << conv_tol << ", max_iter=" << max_iter << ")";
    throw Error(Errc::InvalidTolerance, os.str());
  }
}

namespace {

void require_finite(double v, std::size_t r, std::size_t c) {
  if (!std::isfinite(v)) {
    throw Error(Errc::NonFinite,
                "entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is not finite");
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, std::string(op) + ": shapes differ");
  }
}

void require_square(const DenseMatrix& m, const char* op) {
  if (!m.is_square()) throw Error(Errc::NotSquare, std::string(op) + " needs a square matrix");
}

// Determinant by LU elimination with partial pivoting.
double lu_determinant(DenseMatrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(pivot, k))) pivot = r;
    }
    if (a(pivot, k) == 0.0) return 0.0;
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a(r, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw Error(Errc::InvalidDimension, "matrix dimensions must be at least 1x1");
  }
  require_finite(fill, 0, 0);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(Errc::InvalidDimension, "matrix dimensions must be at least 1x1");
  }
  data_.reserve(rows_ * cols_);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(Errc::InvalidDimension, "ragged row " + std::to_string(r));
    std::size_t c = 0;
    for (double v : row) {
      require_finite(v, r, c++);
      data_.push_back(v);
    }
    ++r;
  }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(Errc::InvalidDimension, "matrix dimensions must be at least 1x1");
  }
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) {
      throw Error(Errc::InvalidDimension, "ragged row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < m.cols_; ++c) {
      require_finite(rows[r][c], r, c);
      m(r, c) = rows[r][c];
    }
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::column_vector(std::span<const double> values) {
  DenseMatrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

Vector DenseMatrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void DenseMatrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) throw Error(Errc::DimensionMismatch, "set_column: length differs");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::norm_inf() const {
  double m = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (double v : row(r)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

double DenseMatrix::norm_frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Vector DenseMatrix::row_sums() const {
  Vector sums(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto rw = row(r);
    sums[r] = std::accumulate(rw.begin(), rw.end(), 0.0);
  }
  return sums;
}

DenseMatrix DenseMatrix::select(std::span<const std::size_t> rows,
                                std::span<const std::size_t> cols) const {
  DenseMatrix s(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) s(r, c) = (*this)(rows[r], cols[c]);
  return s;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator+");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator-");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(Errc::DimensionMismatch, "operator*: inner dimensions differ");
  DenseMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& v : out.data_) v *= s;
  return out;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols_ != x.size()) throw Error(Errc::DimensionMismatch, "matrix-vector: length differs");
  Vector y(a.rows_, 0.0);
  for (std::size_t i = 0; i < a.rows_; ++i) y[i] = dot(a.row(i), x);
  return y;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  return (a - b).max_abs();
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "max_abs_diff: length differs");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "dot: length differs");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw Error(Errc::DimensionMismatch, "hstack: row counts differ");
  DenseMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
  }
  return out;
}

StochasticMatrix validate_stochastic(const DenseMatrix& m, const ToleranceConfig& tol) {
  tol.validate();
  if (!m.is_square()) {
    throw Error(Errc::NotSquare, "influence matrix is " + std::to_string(m.rows()) + "x" +
                                     std::to_string(m.cols()));
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      require_finite(m(r, c), r, c);
      if (m(r, c) < 0.0) throw NegativeEntry(r, c, m(r, c));
      sum += m(r, c);
    }
    if (std::abs(sum - 1.0) > tol.zero_tol) throw RowSumViolation(r, sum);
  }
  return StochasticMatrix(m);
}

std::size_t rank_with_tolerance(const DenseMatrix& m, const ToleranceConfig& tol) {
  DenseMatrix a = m;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    if (std::abs(a(pivot, c)) <= tol.zero_tol) continue;
    if (pivot != rank) {
      for (std::size_t k = 0; k < cols; ++k) std::swap(a(rank, k), a(pivot, k));
    }
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const double f = a(r, c) / a(rank, c);
      if (f == 0.0) continue;
      for (std::size_t k = c; k < cols; ++k) a(r, k) -= f * a(rank, k);
    }
    ++rank;
  }
  return rank;
}

DenseMatrix invert(const DenseMatrix& m, const ToleranceConfig& tol) {
  require_square(m, "invert");
  const std::size_t n = m.rows();
  DenseMatrix a = m;
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(pivot, k))) pivot = r;
    }
    if (std::abs(a(pivot, k)) <= tol.zero_tol) {
      throw Error(Errc::Singular, "pivot " + std::to_string(k) + " below zero tolerance");
    }
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(k, c), a(pivot, c));
        std::swap(inv(k, c), inv(pivot, c));
      }
    }
    const double d = a(k, k);
    for (std::size_t c = 0; c < n; ++c) {
      a(k, c) /= d;
      inv(k, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const double f = a(r, k);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(k, c);
        inv(r, c) -= f * inv(k, c);
      }
    }
  }
  return inv;
}

DenseMatrix pseudo_inverse_full_column_rank(const DenseMatrix& u, const ToleranceConfig& tol) {
  const std::size_t rank = rank_with_tolerance(u, tol);
  if (rank < u.cols()) {
    throw Error(Errc::RankDeficient, "matrix has rank " + std::to_string(rank) + " but " +
                                         std::to_string(u.cols()) + " columns");
  }
  const DenseMatrix ut = u.transpose();
  return invert(ut * u, tol) * ut;
}

double determinant(const DenseMatrix& m) {
  require_square(m, "determinant");
  return lu_determinant(m);
}

double cofactor(const DenseMatrix& m, std::size_t i, std::size_t j) {
  require_square(m, "cofactor");
  const std::size_t n = m.rows();
  if (i >= n || j >= n) throw Error(Errc::DimensionMismatch, "cofactor index out of range");
  if (n == 1) return 1.0;
  std::vector<std::size_t> keep_rows;
  std::vector<std::size_t> keep_cols;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != i) keep_rows.push_back(k);
    if (k != j) keep_cols.push_back(k);
  }
  const double minor = lu_determinant(m.select(keep_rows, keep_cols));
  return ((i + j) % 2 == 0) ? minor : -minor;
}

}  // namespace consensus
