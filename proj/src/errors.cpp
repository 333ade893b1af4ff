#include "consensus/errors.hpp"

#include <sstream>

namespace consensus {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidDimension: return "InvalidDimension";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NotSquare: return "NotSquare";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::RowSumViolation: return "RowSumViolation";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Singular: return "Singular";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::ZeroTrace: return "ZeroTrace";
    case Errc::ResidualTooLarge: return "ResidualTooLarge";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NotStronglyConnected: return "NotStronglyConnected";
    case Errc::RankAssertionFailed: return "RankAssertionFailed";
    case Errc::SingularZ: return "SingularZ";
    case Errc::ZeroXi: return "ZeroXi";
    case Errc::ImproperMatrix: return "ImproperMatrix";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvalidTolerance: return "InvalidTolerance";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::MissingOpinions: return "MissingOpinions";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

namespace {

std::string negative_entry_message(std::size_t row, std::size_t col, double value) {
  std::ostringstream os;
  os << "entry (" << row << ", " << col << ") is negative (" << value << ")";
  return os.str();
}

std::string row_sum_message(std::size_t row, double sum) {
  std::ostringstream os;
  os.precision(12);
  os << "row " << row << " sums to " << sum << ", expected 1";
  return os.str();
}

std::string improper_message(const std::vector<std::size_t>& vertices, std::size_t period) {
  std::ostringstream os;
  os << "final class {";
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (k > 0) os << ", ";
    os << vertices[k] + 1;
  }
  os << "} has period " << period
     << "; the matrix is not proper, so lim P^k does not exist and consensus "
        "analysis requires aperiodic final classes";
  return os.str();
}

}  // namespace

NegativeEntry::NegativeEntry(std::size_t row, std::size_t col, double value)
    : Error(Errc::NegativeEntry, negative_entry_message(row, col, value)), row_(row), col_(col) {}

RowSumViolation::RowSumViolation(std::size_t row, double sum)
    : Error(Errc::RowSumViolation, row_sum_message(row, sum)), row_(row), sum_(sum) {}

NoConvergence::NoConvergence(std::size_t iterations, const std::string& what_failed)
    : Error(Errc::NoConvergence,
            what_failed + " did not converge within " + std::to_string(iterations) + " iterations"),
      iterations_(iterations) {}

ImproperMatrix::ImproperMatrix(std::vector<std::size_t> class_vertices, std::size_t period)
    : Error(Errc::ImproperMatrix, improper_message(class_vertices, period)),
      vertices_(std::move(class_vertices)),
      period_(period) {}

TooLarge::TooLarge(std::size_t size, std::size_t cap)
    : Error(Errc::TooLarge, "size " + std::to_string(size) + " exceeds enumeration cap " +
                                std::to_string(cap)),
      size_(size),
      cap_(cap) {}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                  ": " + message),
      line_(line),
      column_(column) {}

}  // namespace consensus
