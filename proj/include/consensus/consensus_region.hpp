#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "consensus/digraph.hpp"
#include "consensus/limits.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

/// U = [1 | L with one column per final class removed]; its range is the
/// region of convergence to consensus T_P = R(L) + span{1}.
struct RegionBasis {
  DenseMatrix u;
  /// Columns of L removed from U (the smallest vertex of each final class).
  std::vector<std::size_t> deleted_columns;
  /// Columns of L kept in U, in order; U column k+1 is L column kept[k].
  std::vector<std::size_t> kept_columns;
};

/// Orthogonal projection S onto T_P, with its measured defects.
struct OrthogonalProjector {
  DenseMatrix s;
  double symmetry_error;     ///< max|S - S^T|
  double idempotency_error;  ///< max|S^2 - S|
};

/// X and Z built in Frobenius order (basic classes first).
///
/// X is L with its first column replaced by 1 and the first column of every
/// other final class zeroed; Z replaces those zero columns with
/// q^i = pi~^{i-1} - pi~^i. Replaced columns are replaced over their full
/// height, everything else (the nonbasic block rows included) is copied from
/// L. Then S = X Z^-1 and the first row of Z^-1 is alpha.
struct ZConstruction {
  DenseMatrix x;
  DenseMatrix z;
  /// q^2 .. q^nu, Frobenius-ordered, length n.
  std::vector<Vector> q_vectors;
  /// pi~^1 .. pi~^nu: class stationary vectors padded with zeros, Frobenius-ordered.
  std::vector<Vector> pi_tilde;
  /// Rows of nonbasic vertices, columns of basic vertices, taken from X.
  /// Empty when every agent is basic.
  std::optional<DenseMatrix> g_block;
  /// Frobenius permutation the construction is expressed in.
  std::vector<std::size_t> permutation;
  /// Column index in X/Z of each replaced column (0 first, then one per class 2..nu).
  std::vector<std::size_t> replaced_columns;
};

RegionBasis build_region_basis(const KirchhoffMatrix& l, const BicomponentDecomposition& d,
                               const ToleranceConfig& tol = {});

/// S = U (U^T U)^-1 U^T.
OrthogonalProjector orthogonal_projection_via_pinv(const RegionBasis& basis,
                                                   const ToleranceConfig& tol = {});

ZConstruction build_xz(const KirchhoffMatrix& l, const BicomponentDecomposition& d,
                       const PowerLimit& limit, const ToleranceConfig& tol = {});

/// S = X Z^-1, mapped back to original vertex order.
OrthogonalProjector orthogonal_projection_via_z(const ZConstruction& zc,
                                                const ToleranceConfig& tol = {});

/// Z^-1 in Frobenius order. Throws Error(SingularZ).
DenseMatrix z_inverse(const ZConstruction& zc, const ToleranceConfig& tol = {});

/// True iff max|S s0 - s0| <= conv_tol.
bool membership(std::span<const double> s0, const OrthogonalProjector& proj,
                const ToleranceConfig& tol = {});

/// S~: rows of basic vertices from S, rows of nonbasic vertices from P.
DenseMatrix nonorthogonal_projection_tilde(const StochasticMatrix& p,
                                           const OrthogonalProjector& proj,
                                           const BicomponentDecomposition& d);

enum class DictatorialKind {
  ReplaceColumn,  ///< L^(i): column i replaced by 1
  ShiftColumn,    ///< M^(i)_xi: xi * 1 added to column i
};

/// Preequalizers whose consensus is s_i (ReplaceColumn) or xi * s_i
/// (ShiftColumn). Throws Error(ZeroXi) for ShiftColumn with xi == 0.
DenseMatrix dictatorial_matrix(const KirchhoffMatrix& l, std::size_t i, DictatorialKind kind,
                               double xi = 1.0);

}  // namespace consensus
