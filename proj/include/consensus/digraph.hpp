#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "consensus/matrix.hpp"

namespace consensus {

/// Arc of the communication digraph, oriented in the direction of influence:
/// p_ij > 0 yields the arc j -> i with weight p_ij.
struct Arc {
  std::size_t source;
  std::size_t target;
  double weight;

  friend bool operator==(const Arc&, const Arc&) = default;
};

class CommunicationDigraph {
 public:
  CommunicationDigraph(std::size_t n, std::vector<Arc> arcs);

  std::size_t size() const noexcept { return n_; }
  /// All arcs (loops included), sorted by (source, target).
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  /// Arcs entering `v`, sorted by source.
  const std::vector<Arc>& in_arcs(std::size_t v) const { return in_[v]; }
  /// Arcs leaving `v`, sorted by target.
  const std::vector<Arc>& out_arcs(std::size_t v) const { return out_[v]; }

 private:
  std::size_t n_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<Arc>> in_;
  std::vector<std::vector<Arc>> out_;
};

/// L = I - P: zero row sums, nonpositive off-diagonal entries.
struct KirchhoffMatrix {
  DenseMatrix entries;

  std::size_t size() const noexcept { return entries.rows(); }
};

struct DigraphBuild {
  CommunicationDigraph graph;
  KirchhoffMatrix kirchhoff;
};

/// Strong components in Frobenius order: basic (final) classes first, sorted
/// by their smallest vertex, then nonbasic classes ordered so that every class
/// follows all classes with arcs into it (ties broken by smallest vertex).
/// Vertices are ascending inside each class.
struct BicomponentDecomposition {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> is_basic;
  std::size_t nu = 0;  ///< number of basic classes
  std::size_t b = 0;   ///< number of basic vertices
  /// permutation[k] is the original vertex placed at Frobenius position k.
  std::vector<std::size_t> permutation;
  std::vector<std::size_t> class_of;
  std::vector<std::size_t> index_in_class;

  std::size_t size() const noexcept { return class_of.size(); }
  bool vertex_is_basic(std::size_t v) const { return is_basic[class_of[v]]; }
  std::vector<std::size_t> basic_vertices() const;
  std::vector<std::size_t> nonbasic_vertices() const;
  /// Inverse of `permutation`: position of each original vertex.
  std::vector<std::size_t> positions() const;
};

enum class SpectralKind { Regular, ProperNotRegular, Improper };

const char* spectral_kind_name(SpectralKind kind) noexcept;

struct SpectralClass {
  SpectralKind kind;
  /// Period of each basic class, in decomposition order.
  std::vector<std::size_t> periods;

  bool is_proper() const noexcept { return kind != SpectralKind::Improper; }
};

/// Communication digraph (arcs with p_ij <= zero_tol dropped) and L = I - P.
DigraphBuild build(const StochasticMatrix& p, const ToleranceConfig& tol = {});

BicomponentDecomposition decompose(const CommunicationDigraph& g);

/// gcd of closed-walk lengths through the class, from BFS levels.
/// Throws Error(NotStronglyConnected) when the class is not a strong component.
std::size_t class_period(const CommunicationDigraph& g, std::span<const std::size_t> cls);

/// Improper iff some basic class is periodic; Regular iff proper with nu = 1.
SpectralClass spectral_class(const CommunicationDigraph& g, const BicomponentDecomposition& d);

/// Throws ImproperMatrix naming the first periodic basic class.
void require_proper(const BicomponentDecomposition& d, const SpectralClass& spectral);

/// Reindexes a square matrix into Frobenius order: out(a, b) = m(perm[a], perm[b]).
DenseMatrix permute_to_frobenius(const DenseMatrix& m, const BicomponentDecomposition& d);
/// Inverse of permute_to_frobenius.
DenseMatrix permute_from_frobenius(const DenseMatrix& m, const BicomponentDecomposition& d);

/// Graphviz DOT text; vertices are 1-based unless labels are given.
std::string export_dot(const CommunicationDigraph& g, const BicomponentDecomposition& d,
                       std::span<const std::string> labels = {});

}  // namespace consensus
