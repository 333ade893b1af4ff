#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "consensus/digraph.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

/// Brute-force enumeration of spanning out-trees and maximum out-forests.
///
/// Everything here is exhaustive on purpose: these routines are the ground
/// truth that the algebraic routes (the J_k recursion, cofactors of L) are
/// checked against, so they share no code with them. Loops never take part
/// in a tree or forest.
namespace oracle {

inline constexpr std::size_t kDefaultClassCap = 8;
inline constexpr std::size_t kDefaultForestCap = 10;

}  // namespace oracle

/// Out-tree totals of one basic class.
struct ClassTreeWeights {
  std::vector<std::size_t> vertices;  ///< original indices, ascending
  double total = 0.0;                 ///< t: all spanning out-trees
  Vector per_root;                    ///< t_l: trees rooted at vertices[l]
  double w = 0.0;                     ///< W = det of L_i with first column -> pi
};

struct TreeWeights {
  std::vector<ClassTreeWeights> classes;  ///< one entry per basic class
};

/// Normalized matrix of maximum out-forests: entry (i, j) is the weight of
/// the forests in which j is a root and i lies in j's tree, over the weight
/// of all maximum out-forests.
struct ForestMatrix {
  DenseMatrix j_tilde;
  double total_weight;
  std::size_t forest_count;
};

/// Total weight of the spanning out-trees of the subgraph induced by
/// `vertices` that diverge from `root`. A single vertex gives 1.
/// Throws TooLarge when the class exceeds `cap`.
double enumerate_out_trees(const CommunicationDigraph& g, std::span<const std::size_t> vertices,
                           std::size_t root, std::size_t cap = oracle::kDefaultClassCap);

/// pi_j = t_j / t over a strongly connected class.
Vector stationary_via_trees(const CommunicationDigraph& g, std::span<const std::size_t> cls,
                            std::size_t cap = oracle::kDefaultClassCap);

/// Enumerates all spanning out-forests with exactly nu trees.
ForestMatrix maximum_out_forest_matrix(const CommunicationDigraph& g,
                                       const BicomponentDecomposition& d,
                                       std::size_t cap = oracle::kDefaultForestCap);

/// det of `l_i` with its first column replaced by `pi_i`.
double w_determinant(const DenseMatrix& l_i, std::span<const double> pi_i);

/// Per-basic-class tree totals by enumeration.
TreeWeights tree_weights_by_enumeration(const CommunicationDigraph& g,
                                        const BicomponentDecomposition& d,
                                        std::size_t cap = oracle::kDefaultClassCap);

/// Per-basic-class tree totals by the matrix-tree theorem: t_k is the
/// cofactor of the diagonal entry k of the class block L_i.
TreeWeights tree_weights_by_cofactors(const KirchhoffMatrix& l, const BicomponentDecomposition& d);

}  // namespace consensus
