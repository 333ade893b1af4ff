#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "consensus/matrix.hpp"
#include "consensus/tree_oracle.hpp"

namespace consensus {

enum class CheckStatus { Pass, Fail, Skipped };

const char* check_status_name(CheckStatus status) noexcept;

struct CheckResult {
  std::string name;
  CheckStatus status;
  /// Measured error (or the offending count for rank checks).
  double value;
  double threshold;
  std::string detail;
};

struct VerifyOptions {
  std::size_t class_cap = oracle::kDefaultClassCap;
  std::size_t forest_cap = oracle::kDefaultForestCap;
  /// Seed for the random samples (Lemma-style inverse checks, perturbations).
  std::uint64_t seed = 20101104;
  std::size_t random_samples = 20;
};

/// Runs every cross-check on one matrix: the three power-limit routes, both
/// projector routes, the tree/forest oracle against the recursion, the
/// weight-vector properties and ratio laws, the structural rank facts, and
/// the behavioral properties of preequalization.
///
/// Throws ImproperMatrix for periodic inputs and TooLarge when n exceeds
/// `forest_cap`.
std::vector<CheckResult> verify_matrix(const StochasticMatrix& p, const ToleranceConfig& tol,
                                       const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& checks);

/// Built-in fixtures: the 7-agent system with two final classes and one
/// nonbasic class, and its restriction to the five basic agents.
DenseMatrix example_seven_agents();
DenseMatrix example_five_basic_agents();

}  // namespace consensus
