#pragma once

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "consensus/matrix.hpp"
#include "consensus/verification.hpp"

namespace consensus::testing {

inline StochasticMatrix example1() { return validate_stochastic(example_seven_agents()); }
inline StochasticMatrix example2() { return validate_stochastic(example_five_basic_agents()); }

/// Example 1 limit, times 110 (exact rationals).
inline DenseMatrix example1_limit() {
  return (1.0 / 110.0) * DenseMatrix{
                             {44, 44, 22, 0, 0, 0, 0},
                             {44, 44, 22, 0, 0, 0, 0},
                             {44, 44, 22, 0, 0, 0, 0},
                             {0, 0, 0, 44, 66, 0, 0},
                             {0, 0, 0, 44, 66, 0, 0},
                             {32, 32, 16, 12, 18, 0, 0},
                             {16, 16, 8, 28, 42, 0, 0},
                         };
}

inline DenseMatrix example1_projector() {
  return (1.0 / 22.0) * DenseMatrix{
                            {18, -4, -2, 4, 6, 0, 0},
                            {-4, 18, -2, 4, 6, 0, 0},
                            {-2, -2, 21, 2, 3, 0, 0},
                            {4, 4, 2, 18, -6, 0, 0},
                            {6, 6, 3, -6, 13, 0, 0},
                            {0, 0, 0, 0, 0, 22, 0},
                            {0, 0, 0, 0, 0, 0, 22},
                        };
}

/// Rows 6-7 of the Example 1 limit to three decimals. 16/110 = 0.14545 is
/// printed as .146 in the source; it is compared at .145 here.
inline DenseMatrix example1_printed_tail() {
  return {{.291, .291, .145, .109, .164, 0, 0},
          {.145, .145, .073, .255, .382, 0, 0}};
}

inline Vector example1_alpha() {
  return {26.0 / 110, 26.0 / 110, 13.0 / 110, 18.0 / 110, 27.0 / 110, 0.0, 0.0};
}

inline DenseMatrix example1_region_basis() {
  return {
      {1, 0, -0.3, 0, 0, 0},
      {1, 0.1, 0, 0, 0, 0},
      {1, -0.2, 0.6, 0, 0, 0},
      {1, 0, 0, -0.3, 0, 0},
      {1, 0, 0, 0.2, 0, 0},
      {1, -0.1, -0.3, 0, 0.7, -0.3},
      {1, 0, 0, 0, -0.2, 0.4},
  };
}

inline void require_close(const DenseMatrix& a, const DenseMatrix& b, double tol) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  CHECK(max_abs_diff(a, b) <= tol);
}

inline void require_close(std::span<const double> a, std::span<const double> b, double tol) {
  REQUIRE(a.size() == b.size());
  CHECK(max_abs_diff(a, b) <= tol);
}

}  // namespace consensus::testing
