#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consensus/matrix.hpp"
#include "consensus/projection_method.hpp"

namespace consensus::cli {

/// Parsed input file. The matrix has already been validated as row-stochastic
/// under `tolerance`.
struct InputDocument {
  StochasticMatrix matrix;
  std::vector<std::string> labels;
  std::optional<Vector> initial_opinions;
  ToleranceConfig tolerance;
};

/// Throws ParseError (with line and column) for malformed JSON and
/// Error(ValidationError) for missing or ill-shaped fields. Stochasticity
/// failures surface as NegativeEntry / RowSumViolation / NonFinite.
InputDocument parse_input(std::string_view text);
InputDocument load_input(const std::filesystem::path& path);

enum class Command { Analyze, Simulate, Verify, ExportDot };

struct Flags {
  std::optional<double> tolerance;  ///< overrides conv_tol
  std::optional<std::size_t> max_iter;
  PreequalizationMode mode = PreequalizationMode::Orthogonal;
  std::optional<double> tau;
  std::optional<std::size_t> oracle_cap;  ///< caps both class and forest enumeration
};

struct Output {
  std::string text;
  int exit_code = 0;
};

enum ExitCode : int { kSuccess = 0, kUsage = 1, kImproper = 2, kVerificationFailed = 3 };

/// Runs one command on a document. Throws library errors; `verify` reports
/// failures through the exit code instead.
Output execute(Command command, const InputDocument& doc, const Flags& flags);

/// `verify --builtin`: every check on the two embedded fixtures.
Output execute_builtin_verify(const Flags& flags);

/// Full command line entry point. Writes the report to `out` (or to the
/// --output file) and diagnostics to `err`; returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace consensus::cli
