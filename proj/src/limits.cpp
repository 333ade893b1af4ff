#include "consensus/limits.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace consensus {

namespace {

// Highest Richardson order used; higher orders amplify rounding noise in the
// large-tau resolvents more than they remove truncation error.
constexpr std::size_t kMaxRichardsonOrder = 6;
// tau = 2^64 is far past the point where (I + tau L)^-1 is numerically useful.
constexpr std::size_t kMaxDoublings = 64;

}  // namespace

const char* limit_method_name(LimitMethod method) noexcept {
  switch (method) {
    case LimitMethod::Recursive: return "recursive";
    case LimitMethod::Resolvent: return "resolvent";
    case LimitMethod::Iterative: return "iterative";
  }
  return "unknown";
}

PowerLimit power_limit_recursive(const KirchhoffMatrix& l, std::size_t nu,
                                 const ToleranceConfig& tol) {
  const std::size_t n = l.size();
  if (nu == 0 || nu > n) {
    throw Error(Errc::DimensionMismatch, "number of basic classes must lie in 1..n");
  }
  const DenseMatrix identity = DenseMatrix::identity(n);
  DenseMatrix j = identity;
  const std::size_t steps = n - nu;
  for (std::size_t k = 1; k <= steps; ++k) {
    const DenseMatrix lj = l.entries * j;
    const double tr = lj.trace();
    if (std::abs(tr) <= tol.zero_tol) {
      throw Error(Errc::ZeroTrace, "tr(L J_" + std::to_string(k - 1) +
                                       ") vanished before step " + std::to_string(steps) +
                                       "; the number of basic classes is inconsistent with L");
    }
    j = identity - (static_cast<double>(k) / tr) * lj;
  }
  const double residual = (l.entries * j).max_abs();
  if (residual > tol.conv_tol) {
    throw Error(Errc::ResidualTooLarge,
                "max|L J| = " + std::to_string(residual) + " after the recursion");
  }
  return {std::move(j), LimitMethod::Recursive, static_cast<double>(steps)};
}

DenseMatrix resolvent(const KirchhoffMatrix& l, double tau, const ToleranceConfig& tol) {
  if (!(tau > 0.0)) throw Error(Errc::InvalidTolerance, "tau must be positive");
  const std::size_t n = l.size();
  return invert(DenseMatrix::identity(n) + tau * l.entries, tol);
}

ResolventLimit power_limit_resolvent(const KirchhoffMatrix& l, double tau,
                                     const ToleranceConfig& tol) {
  DenseMatrix at_tau = resolvent(l, tau, tol);

  // row[m] is the order-m Richardson extrapolant at the current tau.
  const std::size_t doublings = std::min(tol.max_iter, kMaxDoublings);
  std::vector<DenseMatrix> previous_row;
  double t = 1.0;
  DenseMatrix previous_best = resolvent(l, t, tol);
  previous_row.push_back(previous_best);
  for (std::size_t k = 1; k <= doublings; ++k) {
    t *= 2.0;
    std::vector<DenseMatrix> row;
    row.push_back(resolvent(l, t, tol));
    const std::size_t order = std::min(k, kMaxRichardsonOrder);
    double factor = 1.0;
    for (std::size_t m = 1; m <= order; ++m) {
      factor *= 2.0;
      row.push_back((1.0 / (factor - 1.0)) * (factor * row[m - 1] - previous_row[m - 1]));
    }
    DenseMatrix best = row.back();
    if (max_abs_diff(best, previous_best) < tol.conv_tol) {
      return {std::move(at_tau), {std::move(best), LimitMethod::Resolvent, t}};
    }
    previous_best = std::move(best);
    previous_row = std::move(row);
  }
  throw NoConvergence(doublings, "resolvent extrapolation");
}

PowerLimit power_limit_iterative(const StochasticMatrix& p, const ToleranceConfig& tol) {
  const DenseMatrix& pm = p.matrix();
  DenseMatrix q = pm;
  for (std::size_t k = 0; k < tol.max_iter; ++k) {
    if (max_abs_diff(q * pm, q) < tol.conv_tol) {
      return {std::move(q), LimitMethod::Iterative, static_cast<double>(k)};
    }
    q = q * q;
  }
  throw NoConvergence(tol.max_iter, "repeated squaring of P");
}

}  // namespace consensus
