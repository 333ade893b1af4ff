#include "consensus/projection_method.hpp"

#include <algorithm>
#include <numeric>

namespace consensus {

namespace {

double spread(std::span<const double> s) {
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  return *hi - *lo;
}

void require_length(std::span<const double> s0, std::size_t n) {
  if (s0.size() != n) {
    throw Error(Errc::DimensionMismatch, "opinion vector has length " + std::to_string(s0.size()) +
                                             ", expected " + std::to_string(n));
  }
}

}  // namespace

std::vector<double> beta_weights(const TreeWeights& trees) {
  std::vector<double> beta;
  beta.reserve(trees.classes.size());
  for (const auto& cw : trees.classes) {
    double squares = 0.0;
    for (double t : cw.per_root) squares += t * t;
    beta.push_back(cw.total * cw.total / squares);
  }
  return beta;
}

ConsensusAnalysis analyze(const StochasticMatrix& p, const ToleranceConfig& tol,
                          std::size_t oracle_cap) {
  tol.validate();
  auto [graph, kirchhoff] = build(p, tol);
  BicomponentDecomposition d = decompose(graph);
  SpectralClass spectral = spectral_class(graph, d);
  require_proper(d, spectral);

  PowerLimit p_inf = power_limit_recursive(kirchhoff, d.nu, tol);
  RegionBasis basis = build_region_basis(kirchhoff, d, tol);
  OrthogonalProjector s = orthogonal_projection_via_pinv(basis, tol);
  ZConstruction xz = build_xz(kirchhoff, d, p_inf, tol);
  DenseMatrix s_tilde = nonorthogonal_projection_tilde(p, s, d);
  DenseMatrix p_hat = p_inf.matrix * s.s;

  const std::size_t n = p.size();
  const auto first_row = p_hat.row(0);
  Vector alpha(first_row.begin(), first_row.end());
  const DenseMatrix z_inv = z_inverse(xz, tol);
  Vector alpha_from_z(n);
  for (std::size_t k = 0; k < n; ++k) alpha_from_z[xz.permutation[k]] = z_inv(0, k);

  std::vector<Vector> class_stationary;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& cls = d.classes[c];
    Vector pi;
    for (std::size_t v : cls) pi.push_back(p_inf.matrix(cls.front(), v));
    class_stationary.push_back(std::move(pi));
  }

  // Both routes are exact; enumeration is preferred while it stays cheap.
  const TreeWeights by_cofactors = tree_weights_by_cofactors(kirchhoff, d);
  TreeWeights trees;
  std::vector<TreeWeightSource> sources;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& cls = d.classes[c];
    if (cls.size() <= oracle_cap) {
      BicomponentDecomposition single;
      single.nu = 1;
      single.classes = {cls};
      trees.classes.push_back(tree_weights_by_enumeration(graph, single, oracle_cap).classes[0]);
      sources.push_back(TreeWeightSource::Enumeration);
    } else {
      trees.classes.push_back(by_cofactors.classes[c]);
      sources.push_back(TreeWeightSource::Cofactors);
    }
  }
  std::vector<double> beta = beta_weights(trees);

  return ConsensusAnalysis{p,
                           std::move(graph),
                           std::move(kirchhoff),
                           std::move(d),
                           std::move(spectral),
                           std::move(p_inf),
                           std::move(basis),
                           std::move(s),
                           std::move(xz),
                           std::move(s_tilde),
                           std::move(p_hat),
                           std::move(alpha),
                           std::move(alpha_from_z),
                           std::move(class_stationary),
                           std::move(trees),
                           std::move(sources),
                           std::move(beta)};
}

Vector preequalize(const ConsensusAnalysis& analysis, std::span<const double> s0,
                   PreequalizationMode mode) {
  require_length(s0, analysis.size());
  const DenseMatrix& m = mode == PreequalizationMode::Orthogonal ? analysis.s.s : analysis.s_tilde;
  return m * s0;
}

OpinionTrajectory degroot_iterate(const StochasticMatrix& p, std::span<const double> s0,
                                  const ToleranceConfig& tol) {
  require_length(s0, p.size());
  OpinionTrajectory traj{Vector(s0.begin(), s0.end()), Vector(s0.begin(), s0.end()), {}, 0.0, 0};
  traj.states.emplace_back(s0.begin(), s0.end());
  for (std::size_t k = 0;; ++k) {
    const Vector& current = traj.states.back();
    if (spread(current) < tol.conv_tol) {
      traj.converged_at = k;
      traj.consensus = std::accumulate(current.begin(), current.end(), 0.0) /
                       static_cast<double>(current.size());
      return traj;
    }
    if (k == tol.max_iter) break;
    traj.states.push_back(p.matrix() * current);
  }
  throw NoConvergence(tol.max_iter, "DeGroot iteration");
}

OpinionTrajectory simulate(const StochasticMatrix& p, const ConsensusAnalysis& analysis,
                           std::span<const double> s0, const ToleranceConfig& tol,
                           PreequalizationMode mode) {
  const Vector pre = preequalize(analysis, s0, mode);
  OpinionTrajectory traj = degroot_iterate(p, pre, tol);
  traj.initial.assign(s0.begin(), s0.end());
  return traj;
}

double consensus_value(const ConsensusAnalysis& analysis, std::span<const double> s0) {
  require_length(s0, analysis.size());
  return dot(analysis.alpha, s0);
}

}  // namespace consensus
