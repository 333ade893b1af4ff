#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace consensus {

enum class Errc {
  InvalidDimension,
  NonFinite,
  NotSquare,
  NegativeEntry,
  RowSumViolation,
  DimensionMismatch,
  Singular,
  RankDeficient,
  ZeroTrace,
  ResidualTooLarge,
  NoConvergence,
  NotStronglyConnected,
  RankAssertionFailed,
  SingularZ,
  ZeroXi,
  ImproperMatrix,
  TooLarge,
  InvalidTolerance,
  ParseError,
  ValidationError,
  MissingOpinions,
};

const char* errc_name(Errc code) noexcept;

/// Base of every error raised by the library. `code()` identifies the
/// failure; derived types carry the structured payload where one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class NegativeEntry : public Error {
 public:
  NegativeEntry(std::size_t row, std::size_t col, double value);
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class RowSumViolation : public Error {
 public:
  RowSumViolation(std::size_t row, double sum);
  std::size_t row() const noexcept { return row_; }
  double sum() const noexcept { return sum_; }

 private:
  std::size_t row_;
  double sum_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::size_t iterations, const std::string& what_failed);
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// Raised when a final class is periodic, so lim P^k does not exist.
class ImproperMatrix : public Error {
 public:
  ImproperMatrix(std::vector<std::size_t> class_vertices, std::size_t period);
  const std::vector<std::size_t>& class_vertices() const noexcept { return vertices_; }
  std::size_t period() const noexcept { return period_; }

 private:
  std::vector<std::size_t> vertices_;
  std::size_t period_;
};

class TooLarge : public Error {
 public:
  TooLarge(std::size_t size, std::size_t cap);
  std::size_t size() const noexcept { return size_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t size_;
  std::size_t cap_;
};

/// Malformed input text; line and column are 1-based (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace consensus
