#include "consensus/consensus_region.hpp"

#include <algorithm>
#include <cmath>

namespace consensus {

namespace {

OrthogonalProjector make_projector(DenseMatrix s) {
  const double sym = max_abs_diff(s, s.transpose());
  const double idem = max_abs_diff(s * s, s);
  return {std::move(s), sym, idem};
}

}  // namespace

RegionBasis build_region_basis(const KirchhoffMatrix& l, const BicomponentDecomposition& d,
                               const ToleranceConfig& tol) {
  const std::size_t n = l.size();
  RegionBasis basis{DenseMatrix(n, n - d.nu + 1), {}, {}};
  for (std::size_t c = 0; c < d.nu; ++c) basis.deleted_columns.push_back(d.classes[c].front());
  std::sort(basis.deleted_columns.begin(), basis.deleted_columns.end());

  for (std::size_t r = 0; r < n; ++r) basis.u(r, 0) = 1.0;
  std::size_t col = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::binary_search(basis.deleted_columns.begin(), basis.deleted_columns.end(), j)) continue;
    basis.kept_columns.push_back(j);
    for (std::size_t r = 0; r < n; ++r) basis.u(r, col) = l.entries(r, j);
    ++col;
  }

  const std::size_t rank = rank_with_tolerance(basis.u, tol);
  if (rank != basis.u.cols()) {
    throw Error(Errc::RankAssertionFailed, "U has rank " + std::to_string(rank) + " but " +
                                               std::to_string(basis.u.cols()) + " columns");
  }
  return basis;
}

OrthogonalProjector orthogonal_projection_via_pinv(const RegionBasis& basis,
                                                   const ToleranceConfig& tol) {
  return make_projector(basis.u * pseudo_inverse_full_column_rank(basis.u, tol));
}

ZConstruction build_xz(const KirchhoffMatrix& l, const BicomponentDecomposition& d,
                       const PowerLimit& limit, const ToleranceConfig& tol) {
  const std::size_t n = l.size();
  const auto pos = d.positions();
  ZConstruction zc{permute_to_frobenius(l.entries, d),
                   DenseMatrix(n, n),
                   {},
                   {},
                   std::nullopt,
                   d.permutation,
                   {}};

  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& cls = d.classes[c];
    Vector padded(n, 0.0);
    for (std::size_t v : cls) padded[pos[v]] = limit.matrix(cls.front(), v);
    zc.pi_tilde.push_back(std::move(padded));
  }

  const Vector ones(n, 1.0);
  const Vector zeros(n, 0.0);
  zc.x.set_column(0, ones);
  zc.replaced_columns.push_back(0);
  for (std::size_t c = 1; c < d.nu; ++c) {
    const std::size_t col = pos[d.classes[c].front()];
    zc.x.set_column(col, zeros);
    zc.replaced_columns.push_back(col);
    Vector q(n);
    for (std::size_t k = 0; k < n; ++k) q[k] = zc.pi_tilde[c - 1][k] - zc.pi_tilde[c][k];
    zc.q_vectors.push_back(std::move(q));
  }

  zc.z = zc.x;
  for (std::size_t c = 1; c < d.nu; ++c) zc.z.set_column(zc.replaced_columns[c], zc.q_vectors[c - 1]);

  if (d.b < n) {
    std::vector<std::size_t> rows(n - d.b);
    std::vector<std::size_t> cols(d.b);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = d.b + k;
    for (std::size_t k = 0; k < cols.size(); ++k) cols[k] = k;
    zc.g_block = zc.x.select(rows, cols);
  }

  // Z is nonsingular for every proper P; failing here means a bug or a bad tolerance.
  if (rank_with_tolerance(zc.z, tol) != n) {
    throw Error(Errc::SingularZ, "Z is numerically singular");
  }
  return zc;
}

DenseMatrix z_inverse(const ZConstruction& zc, const ToleranceConfig& tol) {
  try {
    return invert(zc.z, tol);
  } catch (const Error& e) {
    if (e.code() == Errc::Singular) throw Error(Errc::SingularZ, e.what());
    throw;
  }
}

OrthogonalProjector orthogonal_projection_via_z(const ZConstruction& zc,
                                                const ToleranceConfig& tol) {
  const DenseMatrix s_frobenius = zc.x * z_inverse(zc, tol);
  const std::size_t n = s_frobenius.rows();
  DenseMatrix s(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) s(zc.permutation[a], zc.permutation[b]) = s_frobenius(a, b);
  return make_projector(std::move(s));
}

bool membership(std::span<const double> s0, const OrthogonalProjector& proj,
                const ToleranceConfig& tol) {
  return max_abs_diff(proj.s * s0, s0) <= tol.conv_tol;
}

DenseMatrix nonorthogonal_projection_tilde(const StochasticMatrix& p,
                                           const OrthogonalProjector& proj,
                                           const BicomponentDecomposition& d) {
  DenseMatrix tilde = proj.s;
  const std::size_t n = p.size();
  for (std::size_t v : d.nonbasic_vertices())
    for (std::size_t c = 0; c < n; ++c) tilde(v, c) = p(v, c);
  return tilde;
}

DenseMatrix dictatorial_matrix(const KirchhoffMatrix& l, std::size_t i, DictatorialKind kind,
                               double xi) {
  const std::size_t n = l.size();
  if (i >= n) throw Error(Errc::DimensionMismatch, "agent index out of range");
  DenseMatrix m = l.entries;
  if (kind == DictatorialKind::ReplaceColumn) {
    m.set_column(i, Vector(n, 1.0));
    return m;
  }
  if (xi == 0.0) throw Error(Errc::ZeroXi, "xi must be nonzero");
  for (std::size_t r = 0; r < n; ++r) m(r, i) += xi;
  return m;
}

}  // namespace consensus
