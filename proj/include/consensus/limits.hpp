#pragma once

#include <cstddef>

#include "consensus/digraph.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

enum class LimitMethod { Recursive, Resolvent, Iterative };

const char* limit_method_name(LimitMethod method) noexcept;

/// lim P^k, together with the route that produced it.
struct PowerLimit {
  DenseMatrix matrix;
  LimitMethod method;
  /// Recursion steps, final tau, or number of squarings, depending on method.
  double diagnostic;
};

/// J_k = I - k L J_{k-1} / tr(L J_{k-1}) for k = 1..n-nu, starting at J_0 = I.
/// Errors: ZeroTrace when the trace vanishes early, ResidualTooLarge when
/// max|L J| exceeds conv_tol at the end.
PowerLimit power_limit_recursive(const KirchhoffMatrix& l, std::size_t nu,
                                 const ToleranceConfig& tol = {});

/// (I + tau L)^-1 for a single tau > 0.
DenseMatrix resolvent(const KirchhoffMatrix& l, double tau, const ToleranceConfig& tol = {});

struct ResolventLimit {
  DenseMatrix at_tau;  ///< (I + tau L)^-1 at the requested tau
  PowerLimit limit;    ///< extrapolated tau -> infinity limit
};

/// Evaluates the resolvent at tau = 1, 2, 4, ... and Richardson-extrapolates
/// the sequence in 1/tau until successive extrapolants differ by < conv_tol.
ResolventLimit power_limit_resolvent(const KirchhoffMatrix& l, double tau,
                                     const ToleranceConfig& tol = {});

/// Repeated squaring Q <- Q^2 starting at Q = P until max|Q P - Q| < conv_tol.
/// Throws NoConvergence after max_iter squarings, which is what happens for
/// improper (periodic) matrices.
PowerLimit power_limit_iterative(const StochasticMatrix& p, const ToleranceConfig& tol = {});

}  // namespace consensus
