#include "consensus/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "consensus/projection_method.hpp"

namespace consensus {

namespace {

class Recorder {
 public:
  void within(std::string name, double value, double threshold, std::string detail = {}) {
    const bool ok = std::isfinite(value) && value <= threshold;
    out_.push_back({std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, value, threshold,
                    std::move(detail)});
  }

  void equal_count(std::string name, std::size_t actual, std::size_t expected) {
    std::ostringstream os;
    os << "got " << actual << ", expected " << expected;
    out_.push_back({std::move(name), actual == expected ? CheckStatus::Pass : CheckStatus::Fail,
                    static_cast<double>(actual), static_cast<double>(expected), os.str()});
  }

  void holds(std::string name, bool ok, std::string detail = {}) {
    out_.push_back({std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, ok ? 0.0 : 1.0,
                    0.0, std::move(detail)});
  }

  void skip(std::string name, std::string reason) {
    out_.push_back({std::move(name), CheckStatus::Skipped, 0.0, 0.0, std::move(reason)});
  }

  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  std::vector<CheckResult> out_;
};

Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double spread(std::span<const double> s) {
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  return *hi - *lo;
}

// Orthogonal projection of x onto R(U) by modified Gram-Schmidt. Shares no
// code with the (U^T U)^-1 route.
Vector project_by_gram_schmidt(const DenseMatrix& u, std::span<const double> x) {
  std::vector<Vector> q;
  for (std::size_t c = 0; c < u.cols(); ++c) {
    Vector v = u.column(c);
    for (const Vector& e : q) {
      const double r = dot(e, v);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= r * e[k];
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-12) continue;
    for (double& vk : v) vk /= norm;
    q.push_back(std::move(v));
  }
  Vector y(x.size(), 0.0);
  for (const Vector& e : q) {
    const double r = dot(e, x);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += r * e[k];
  }
  return y;
}

Vector row_times(std::span<const double> row, const DenseMatrix& m) {
  return m.transpose() * row;
}

void check_limits(Recorder& rec, const StochasticMatrix& p, const ConsensusAnalysis& a,
                  const ToleranceConfig& tol) {
  const DenseMatrix& pinf = a.p_inf.matrix;
  const DenseMatrix& l = a.kirchhoff.entries;
  const std::size_t n = p.size();
  const std::size_t nu = a.decomposition.nu;

  const auto res = power_limit_resolvent(a.kirchhoff, 1.0, tol);
  const auto it = power_limit_iterative(p, tol);
  rec.within("limits.recursive_vs_resolvent", max_abs_diff(pinf, res.limit.matrix), 1e-6);
  rec.within("limits.recursive_vs_iterative", max_abs_diff(pinf, it.matrix), 1e-6);
  rec.within("limits.resolvent_vs_iterative", max_abs_diff(res.limit.matrix, it.matrix), 1e-6);
  rec.within("limits.row_stochastic", max_abs_diff(pinf.row_sums(), Vector(n, 1.0)), 1e-9);
  rec.within("limits.idempotent", max_abs_diff(pinf * pinf, pinf), 1e-9);
  rec.within("limits.annihilates_kirchhoff",
             std::max((pinf * l).max_abs(), (l * pinf).max_abs()), 1e-9);

  double nonbasic_columns = 0.0;
  for (std::size_t v : a.decomposition.nonbasic_vertices())
    for (std::size_t r = 0; r < n; ++r) nonbasic_columns = std::max(nonbasic_columns, std::abs(pinf(r, v)));
  rec.within("limits.nonbasic_columns_zero", nonbasic_columns, 1e-9);

  if (a.spectral.kind == SpectralKind::Regular) {
    double dev = 0.0;
    for (std::size_t r = 1; r < n; ++r) dev = std::max(dev, max_abs_diff(pinf.row(r), pinf.row(0)));
    const Vector pi(pinf.row(0).begin(), pinf.row(0).end());
    rec.within("limits.regular_rows_identical", dev, 1e-9);
    rec.within("limits.regular_row_stationary", max_abs_diff(row_times(pi, p.matrix()), pi), 1e-9);
  } else {
    rec.skip("limits.regular_rows_identical", "matrix is not regular");
    rec.skip("limits.regular_row_stationary", "matrix is not regular");
  }

  const std::size_t rank_l = rank_with_tolerance(l, tol);
  rec.equal_count("structure.rank_kirchhoff", rank_l, n - nu);
  rec.equal_count("structure.rank_power_limit", rank_with_tolerance(pinf, tol), nu);
  rec.equal_count("structure.index_one", rank_with_tolerance(l * l, tol), rank_l);
  rec.equal_count("structure.nullity_kirchhoff", n - rank_l, nu);
  // Columns of P_inf span N(L), columns of L span R(L).
  rec.equal_count("structure.kernel_range_complementary", rank_with_tolerance(hstack(pinf, l), tol), n);
}

void check_projector(Recorder& rec, const ConsensusAnalysis& a, const ToleranceConfig& tol,
                     std::mt19937_64& rng, std::size_t samples) {
  const DenseMatrix& s = a.s.s;
  const DenseMatrix& l = a.kirchhoff.entries;
  const std::size_t n = s.rows();
  const auto& d = a.decomposition;
  const Vector ones(n, 1.0);

  const OrthogonalProjector via_z = orthogonal_projection_via_z(a.xz, tol);
  rec.within("projector.routes_agree", max_abs_diff(via_z.s, s), 1e-8);
  rec.within("projector.symmetric", a.s.symmetry_error, 1e-10);
  rec.within("projector.idempotent", a.s.idempotency_error, 1e-9);
  rec.within("projector.fixes_ones", max_abs_diff(s * ones, ones), 1e-9);
  rec.equal_count("projector.range_dimension", rank_with_tolerance(s, tol), n - d.nu + 1);

  // Block form diag(S_B, I): nonbasic rows and columns are unit vectors.
  double block = 0.0;
  for (std::size_t v : d.nonbasic_vertices()) {
    for (std::size_t k = 0; k < n; ++k) {
      const double unit = k == v ? 1.0 : 0.0;
      block = std::max({block, std::abs(s(v, k) - unit), std::abs(s(k, v) - unit)});
    }
  }
  rec.within("projector.block_form", block, 1e-9);

  // R(L) + span{1} is fixed by S and has dimension n - nu + 1.
  rec.equal_count("region.dimension", rank_with_tolerance(hstack(l, DenseMatrix(n, 1, 1.0)), tol),
                  n - d.nu + 1);
  rec.within("region.kirchhoff_columns_fixed", max_abs_diff(s * l, l), 1e-9);

  double lsq = 0.0;
  double nonbasic_kept = 0.0;
  double consensus_reached = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Vector x = random_vector(rng, n);
    const Vector sx = s * x;
    lsq = std::max(lsq, max_abs_diff(sx, project_by_gram_schmidt(a.basis.u, x)));
    for (std::size_t v : d.nonbasic_vertices()) nonbasic_kept = std::max(nonbasic_kept, std::abs(sx[v] - x[v]));
    consensus_reached = std::max(consensus_reached, spread(a.p_inf.matrix * sx));
  }
  rec.within("projector.least_squares", lsq, 1e-8);
  rec.within("preequalization.keeps_nonbasic_opinions", nonbasic_kept, 1e-9);
  rec.within("preequalization.reaches_consensus", consensus_reached, 1e-9);
}

void check_oracle(Recorder& rec, const ConsensusAnalysis& a, const ToleranceConfig& tol,
                  const VerifyOptions& options) {
  const auto& d = a.decomposition;
  const DenseMatrix& pinf = a.p_inf.matrix;

  const ForestMatrix forests = maximum_out_forest_matrix(a.graph, d, options.forest_cap);
  rec.within("oracle.forest_matrix_equals_limit", max_abs_diff(forests.j_tilde, pinf), 1e-8);

  const TreeWeights cof = tree_weights_by_cofactors(a.kirchhoff, d);
  double stationary = 0.0;
  double matrix_tree = 0.0;
  double w_identity = 0.0;
  bool enumerated_all = true;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& cls = d.classes[c];
    if (cls.size() > options.class_cap) {
      enumerated_all = false;
      continue;
    }
    const Vector pi = stationary_via_trees(a.graph, cls, options.class_cap);
    for (std::size_t r : cls) {
      Vector block_row;
      for (std::size_t v : cls) block_row.push_back(pinf(r, v));
      stationary = std::max(stationary, max_abs_diff(pi, block_row));
    }

    BicomponentDecomposition single;
    single.nu = 1;
    single.classes = {cls};
    const ClassTreeWeights tw = tree_weights_by_enumeration(a.graph, single, options.class_cap).classes[0];
    const DenseMatrix block = a.kirchhoff.entries.select(cls, cls);
    for (std::size_t k = 0; k < cls.size(); ++k)
      for (std::size_t j = 0; j < cls.size(); ++j)
        matrix_tree = std::max(matrix_tree, std::abs(cofactor(block, k, j) - tw.per_root[k]) / tw.total);

    double squares = 0.0;
    for (double t : tw.per_root) squares += t * t;
    const double expected_w = squares / tw.total;
    w_identity = std::max({w_identity, std::abs(tw.w - expected_w) / expected_w,
                           std::abs(cof.classes[c].w - expected_w) / expected_w});
  }
  const std::string partial = enumerated_all ? "" : "classes above the cap were not enumerated";
  rec.within("oracle.class_stationary_vectors", stationary, 1e-8, partial);
  rec.within("oracle.matrix_tree_cofactors", matrix_tree, 1e-9, partial);
  rec.within("oracle.w_determinant_identity", w_identity, 1e-9, partial);
  (void)tol;
}

void check_alpha(Recorder& rec, const StochasticMatrix& p, const ConsensusAnalysis& a,
                 const ToleranceConfig& tol) {
  const auto& d = a.decomposition;
  const std::size_t n = p.size();
  const Vector& alpha = a.alpha;

  double sum = 0.0;
  for (double v : alpha) sum += v;
  rec.within("alpha.sums_to_one", std::abs(sum - 1.0), 1e-9);

  double min_basic = 1.0;
  for (std::size_t v : d.basic_vertices()) min_basic = std::min(min_basic, alpha[v]);
  rec.holds("alpha.positive_on_basic", min_basic > 0.0, "min basic weight " + std::to_string(min_basic));
  double max_nonbasic = 0.0;
  for (std::size_t v : d.nonbasic_vertices()) max_nonbasic = std::max(max_nonbasic, std::abs(alpha[v]));
  rec.within("alpha.zero_on_nonbasic", max_nonbasic, 1e-9);

  double rank_one = 0.0;
  for (std::size_t r = 0; r < n; ++r) rank_one = std::max(rank_one, max_abs_diff(a.p_hat.row(r), alpha));
  rec.within("alpha.regularized_limit_rows", rank_one, 1e-9);
  rec.within("alpha.stationary", max_abs_diff(row_times(alpha, p.matrix()), alpha), 1e-9);
  rec.within("alpha.first_row_of_z_inverse", max_abs_diff(alpha, a.alpha_from_z), 1e-9);

  const DenseMatrix& pm = p.matrix();
  const DenseMatrix& ph = a.p_hat;
  const DenseMatrix& pinf = a.p_inf.matrix;
  rec.within("alpha.regularized_limit_absorbs",
             std::max({max_abs_diff(ph * pm, ph), max_abs_diff(pm * ph, ph),
                       max_abs_diff(pinf * ph, ph), max_abs_diff(ph * pinf, ph)}),
             1e-9);

  const DenseMatrix z_inv = z_inverse(a.xz, tol);
  const Vector sums = z_inv.row_sums();
  double row_sums = std::abs(sums[0] - 1.0);
  for (std::size_t r = 1; r < n; ++r) row_sums = std::max(row_sums, std::abs(sums[r]));
  rec.within("z_inverse.row_sums", row_sums, 1e-9);

  // q vectors are left null vectors of L (Frobenius order).
  double lq = 0.0;
  const DenseMatrix lf = permute_to_frobenius(a.kirchhoff.entries, d).transpose();
  for (const Vector& q : a.xz.q_vectors) lq = std::max(lq, max_abs_diff(lf * q, Vector(n, 0.0)));
  rec.within("z.q_vectors_in_left_kernel", lq, 1e-9);

  // Ratio laws: alpha on basic vertices is proportional to beta_c * pi_g and
  // to t_k * t / sum t_l^2; both normalized to sum 1.
  Vector by_beta(n, 0.0);
  Vector by_trees(n, 0.0);
  double beta_total = 0.0;
  double trees_total = 0.0;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& tw = a.trees.classes[c];
    double squares = 0.0;
    for (double t : tw.per_root) squares += t * t;
    for (std::size_t k = 0; k < tw.vertices.size(); ++k) {
      const std::size_t g = tw.vertices[k];
      by_beta[g] = a.beta[c] * (tw.per_root[k] / tw.total);
      by_trees[g] = tw.per_root[k] * tw.total / squares;
      beta_total += by_beta[g];
      trees_total += by_trees[g];
    }
  }
  for (double& v : by_beta) v /= beta_total;
  for (double& v : by_trees) v /= trees_total;
  rec.within("alpha.ratio_law_beta", max_abs_diff(by_beta, alpha), 1e-8);
  rec.within("alpha.ratio_law_tree_totals", max_abs_diff(by_trees, alpha), 1e-8);

  // First-column cofactors of Z when every agent is basic.
  if (d.b == n) {
    double worst = 0.0;
    const double sign = (d.nu % 2 == 1) ? 1.0 : -1.0;  // (-1)^(nu+1)
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t v = d.permutation[h];
      const std::size_t c = d.class_of[v];
      double expected = sign * a.trees.classes[c].per_root[d.index_in_class[v]];
      for (std::size_t u = 0; u < d.nu; ++u)
        if (u != c) expected *= a.trees.classes[u].w;
      const double got = cofactor(a.xz.z, h, 0);
      worst = std::max(worst, std::abs(got - expected) / std::max(std::abs(expected), 1e-300));
    }
    rec.within("z.first_column_cofactors", worst, 1e-8);
  } else {
    rec.skip("z.first_column_cofactors", "identity stated for systems without nonbasic agents");
  }
}

void check_behaviour(Recorder& rec, const StochasticMatrix& p, const ConsensusAnalysis& a,
                     const ToleranceConfig& tol, std::mt19937_64& rng, std::size_t samples) {
  const auto& d = a.decomposition;
  const std::size_t n = p.size();
  const DenseMatrix& pinf = a.p_inf.matrix;

  double dictator = 0.0;
  double tilde_same = 0.0;
  double nonbasic_free = 0.0;
  double simulated = 0.0;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const Vector s0 = random_vector(rng, n);
    const std::size_t i = pick(rng);
    const Vector by_replace = pinf * (dictatorial_matrix(a.kirchhoff, i, DictatorialKind::ReplaceColumn) * s0);
    const Vector by_shift = pinf * (dictatorial_matrix(a.kirchhoff, i, DictatorialKind::ShiftColumn, 2.0) * s0);
    dictator = std::max({dictator, max_abs_diff(by_replace, Vector(n, s0[i])),
                         max_abs_diff(by_shift, Vector(n, 2.0 * s0[i]))});

    const Vector via_s = pinf * preequalize(a, s0, PreequalizationMode::Orthogonal);
    const Vector via_tilde = pinf * preequalize(a, s0, PreequalizationMode::Tilde);
    tilde_same = std::max(tilde_same, max_abs_diff(via_s, via_tilde));

    Vector perturbed = s0;
    for (std::size_t v : d.nonbasic_vertices()) perturbed[v] += random_vector(rng, 1)[0] * 10.0;
    nonbasic_free = std::max({nonbasic_free,
                              std::abs(consensus_value(a, perturbed) - consensus_value(a, s0)),
                              max_abs_diff(pinf * preequalize(a, perturbed), via_s)});

    if (k < 3) {
      const OpinionTrajectory traj = simulate(p, a, s0, tol);
      simulated = std::max(simulated, std::abs(traj.consensus - consensus_value(a, s0)));
    }
  }
  rec.within("preequalization.dictatorial_consensus", dictator, 1e-9);
  rec.within("preequalization.tilde_same_consensus", tilde_same, 1e-9);
  rec.within("preequalization.nonbasic_opinions_irrelevant", nonbasic_free, 1e-9);
  rec.within("simulation.matches_weight_vector", simulated, 2.0 * tol.conv_tol);

  rec.within("tilde.range_inside_region", max_abs_diff(a.s.s * a.s_tilde, a.s_tilde), 1e-9);
  if (d.b < n) {
    const double to_tilde = (p.matrix() - a.s_tilde).norm_frobenius();
    const double to_s = (p.matrix() - a.s.s).norm_frobenius();
    rec.holds("tilde.closer_to_p", to_tilde < to_s,
              std::to_string(to_tilde) + " vs " + std::to_string(to_s));

    const auto basic = d.basic_vertices();
    std::vector<std::size_t> sorted_basic = basic;
    std::sort(sorted_basic.begin(), sorted_basic.end());
    const StochasticMatrix pb = validate_stochastic(p.matrix().select(sorted_basic, sorted_basic), tol);
    const ConsensusAnalysis ab = analyze(pb, tol);
    double deleted = 0.0;
    for (std::size_t k = 0; k < sorted_basic.size(); ++k)
      deleted = std::max(deleted, std::abs(ab.alpha[k] - a.alpha[sorted_basic[k]]));
    rec.within("nonbasic.deletion_preserves_weights", deleted, 1e-9);
  } else {
    rec.skip("tilde.closer_to_p", "no nonbasic agents");
    rec.skip("nonbasic.deletion_preserves_weights", "no nonbasic agents");
  }
}

void check_inverse_row_sums(Recorder& rec, std::size_t n, const ToleranceConfig& tol,
                            std::mt19937_64& rng, std::size_t samples) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double first_column = 0.0;
  double constant_column = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const double y = u(rng) < 0.0 ? -1.5 : 2.5;
    DenseMatrix a(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) a(r, c) = u(rng);
      a(r, r) += 2.0 * static_cast<double>(n);
    }
    DenseMatrix first = a;
    first.set_column(0, Vector(n, 1.0));
    DenseMatrix constant = a;
    constant.set_column(k, Vector(n, y));

    Vector e1(n, 0.0);
    e1[0] = 1.0;
    Vector ek(n, 0.0);
    ek[k] = 1.0 / y;
    const Vector ones(n, 1.0);
    first_column = std::max(first_column, max_abs_diff(invert(first, tol) * ones, e1));
    constant_column = std::max(constant_column, max_abs_diff(invert(constant, tol) * ones, ek));
  }
  rec.within("inverse.first_column_ones_row_sums", first_column, 1e-9);
  rec.within("inverse.constant_column_row_sums", constant_column, 1e-9);
}

}  // namespace

const char* check_status_name(CheckStatus status) noexcept {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

std::vector<CheckResult> verify_matrix(const StochasticMatrix& p, const ToleranceConfig& tol,
                                       const VerifyOptions& options) {
  if (p.size() > options.forest_cap) throw TooLarge(p.size(), options.forest_cap);
  const ConsensusAnalysis a = analyze(p, tol, options.class_cap);
  std::mt19937_64 rng(options.seed);
  Recorder rec;
  check_limits(rec, p, a, tol);
  check_projector(rec, a, tol, rng, options.random_samples);
  check_oracle(rec, a, tol, options);
  check_alpha(rec, p, a, tol);
  check_behaviour(rec, p, a, tol, rng, options.random_samples);
  check_inverse_row_sums(rec, p.size(), tol, rng, options.random_samples);
  return rec.take();
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

DenseMatrix example_seven_agents() {
  return {
      {0.7, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0},
      {0.1, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0},
      {0.4, 0.2, 0.4, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.7, 0.3, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.2, 0.8, 0.0, 0.0},
      {0.0, 0.1, 0.3, 0.0, 0.0, 0.3, 0.3},
      {0.0, 0.0, 0.0, 0.2, 0.0, 0.2, 0.6},
  };
}

DenseMatrix example_five_basic_agents() {
  return {
      {0.7, 0.0, 0.3, 0.0, 0.0},
      {0.1, 0.9, 0.0, 0.0, 0.0},
      {0.4, 0.2, 0.4, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.7, 0.3},
      {0.0, 0.0, 0.0, 0.2, 0.8},
  };
}

}  // namespace consensus
