#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "consensus/consensus_region.hpp"
#include "consensus/digraph.hpp"
#include "consensus/limits.hpp"
#include "consensus/matrix.hpp"
#include "consensus/tree_oracle.hpp"

namespace consensus {

enum class PreequalizationMode { Orthogonal, Tilde };

enum class TreeWeightSource { Enumeration, Cofactors };

/// Full result of the orthogonal projection procedure for one matrix P.
///
/// The regularized power limit is p_hat = P_inf S = 1 alpha^T. alpha is
/// taken from the first row of p_hat; alpha_from_z is the first row of Z^-1
/// and should agree with it to rounding.
struct ConsensusAnalysis {
  StochasticMatrix p;
  CommunicationDigraph graph;
  KirchhoffMatrix kirchhoff;
  BicomponentDecomposition decomposition;
  SpectralClass spectral;
  PowerLimit p_inf;
  RegionBasis basis;
  OrthogonalProjector s;
  ZConstruction xz;
  DenseMatrix s_tilde;
  DenseMatrix p_hat;
  Vector alpha;
  Vector alpha_from_z;
  /// Stationary vector of each basic class (entries follow the class's vertices).
  std::vector<Vector> class_stationary;
  TreeWeights trees;
  /// Per basic class: where its tree weights came from.
  std::vector<TreeWeightSource> tree_sources;
  std::vector<double> beta;

  std::size_t size() const noexcept { return p.size(); }
};

struct OpinionTrajectory {
  Vector initial;
  Vector preequalized;
  /// states[0] is the preequalized vector, states[k] = P states[k-1].
  std::vector<Vector> states;
  double consensus;
  std::size_t converged_at;
};

/// Runs the whole pipeline. Throws ImproperMatrix when a final class is periodic.
/// Tree weights come from enumeration for classes of at most `oracle_cap`
/// vertices and from cofactors of L otherwise.
ConsensusAnalysis analyze(const StochasticMatrix& p, const ToleranceConfig& tol = {},
                          std::size_t oracle_cap = oracle::kDefaultClassCap);

/// beta_i = t_i^2 / sum_l (t_il)^2 for each basic class.
std::vector<double> beta_weights(const TreeWeights& trees);

Vector preequalize(const ConsensusAnalysis& analysis, std::span<const double> s0,
                   PreequalizationMode mode = PreequalizationMode::Orthogonal);

/// Plain DeGroot iteration s(k) = P s(k-1) from s0 until the spread
/// max - min drops below conv_tol. Throws NoConvergence after max_iter steps.
OpinionTrajectory degroot_iterate(const StochasticMatrix& p, std::span<const double> s0,
                                  const ToleranceConfig& tol = {});

/// Preequalizes s0, then runs degroot_iterate.
OpinionTrajectory simulate(const StochasticMatrix& p, const ConsensusAnalysis& analysis,
                           std::span<const double> s0, const ToleranceConfig& tol = {},
                           PreequalizationMode mode = PreequalizationMode::Orthogonal);

/// alpha^T s0.
double consensus_value(const ConsensusAnalysis& analysis, std::span<const double> s0);

}  // namespace consensus
