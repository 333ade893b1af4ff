#include "consensus/tree_oracle.hpp"

#include <algorithm>
#include <limits>

namespace consensus {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// In-arc candidates and parent assignment over a vertex subset, using local
// indices 0..m-1.
struct LocalGraph {
  std::vector<std::size_t> vertices;
  std::vector<std::vector<std::pair<std::size_t, double>>> in;  // (local source, weight)
};

LocalGraph restrict(const CommunicationDigraph& g, std::span<const std::size_t> vertices) {
  LocalGraph lg;
  lg.vertices.assign(vertices.begin(), vertices.end());
  std::vector<std::size_t> local(g.size(), kNone);
  for (std::size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = k;
  lg.in.resize(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    for (const Arc& a : g.in_arcs(vertices[k])) {
      if (a.source == a.target || local[a.source] == kNone) continue;
      lg.in[k].emplace_back(local[a.source], a.weight);
    }
  }
  return lg;
}

// True when giving `v` the parent `u` closes a cycle among assigned vertices.
bool closes_cycle(const std::vector<std::size_t>& parent, std::size_t v, std::size_t u) {
  for (std::size_t w = u; w != kNone; w = parent[w]) {
    if (w == v) return true;
  }
  return false;
}

double sum_trees(const LocalGraph& lg, std::size_t root, std::vector<std::size_t>& parent,
                 std::size_t next, double weight) {
  const std::size_t m = lg.vertices.size();
  if (next == m) return weight;
  if (next == root) return sum_trees(lg, root, parent, next + 1, weight);
  double total = 0.0;
  for (const auto& [u, w] : lg.in[next]) {
    if (closes_cycle(parent, next, u)) continue;
    parent[next] = u;
    total += sum_trees(lg, root, parent, next + 1, weight * w);
    parent[next] = kNone;
  }
  return total;
}

struct ForestSearch {
  const LocalGraph& lg;
  std::size_t roots_needed;
  std::vector<std::size_t> parent;
  std::size_t roots_used = 0;
  DenseMatrix accum;
  double total = 0.0;
  std::size_t count = 0;

  void visit(std::size_t next, double weight) {
    const std::size_t m = lg.vertices.size();
    if (next == m) {
      if (roots_used != roots_needed) return;
      ++count;
      total += weight;
      for (std::size_t i = 0; i < m; ++i) {
        std::size_t r = i;
        while (parent[r] != kNone) r = parent[r];
        accum(i, r) += weight;
      }
      return;
    }
    // Not enough vertices left to supply the missing roots.
    if (roots_needed - roots_used > m - next) return;
    if (roots_used < roots_needed) {
      ++roots_used;
      visit(next + 1, weight);
      --roots_used;
    }
    for (const auto& [u, w] : lg.in[next]) {
      if (closes_cycle(parent, next, u)) continue;
      parent[next] = u;
      visit(next + 1, weight * w);
      parent[next] = kNone;
    }
  }
};

DenseMatrix class_kirchhoff_from_arcs(const LocalGraph& lg) {
  const std::size_t m = lg.vertices.size();
  DenseMatrix l(m, m);
  for (std::size_t v = 0; v < m; ++v) {
    for (const auto& [u, w] : lg.in[v]) {
      l(v, u) -= w;
      l(v, v) += w;
    }
  }
  return l;
}

}  // namespace

double enumerate_out_trees(const CommunicationDigraph& g, std::span<const std::size_t> vertices,
                           std::size_t root, std::size_t cap) {
  if (vertices.size() > cap) throw TooLarge(vertices.size(), cap);
  const auto it = std::find(vertices.begin(), vertices.end(), root);
  if (it == vertices.end()) throw Error(Errc::DimensionMismatch, "root is not in the vertex set");
  const LocalGraph lg = restrict(g, vertices);
  std::vector<std::size_t> parent(vertices.size(), kNone);
  return sum_trees(lg, static_cast<std::size_t>(it - vertices.begin()), parent, 0, 1.0);
}

Vector stationary_via_trees(const CommunicationDigraph& g, std::span<const std::size_t> cls,
                            std::size_t cap) {
  Vector pi(cls.size());
  double total = 0.0;
  for (std::size_t k = 0; k < cls.size(); ++k) {
    pi[k] = enumerate_out_trees(g, cls, cls[k], cap);
    total += pi[k];
  }
  if (!(total > 0.0)) {
    throw Error(Errc::NotStronglyConnected, "class has no spanning out-tree");
  }
  for (double& v : pi) v /= total;
  return pi;
}

ForestMatrix maximum_out_forest_matrix(const CommunicationDigraph& g,
                                       const BicomponentDecomposition& d, std::size_t cap) {
  const std::size_t n = g.size();
  if (n > cap) throw TooLarge(n, cap);
  std::vector<std::size_t> all(n);
  for (std::size_t v = 0; v < n; ++v) all[v] = v;
  const LocalGraph lg = restrict(g, all);

  ForestSearch search{lg, d.nu, std::vector<std::size_t>(n, kNone), 0, DenseMatrix(n, n)};
  search.visit(0, 1.0);
  if (!(search.total > 0.0)) {
    throw Error(Errc::RankAssertionFailed, "no spanning out-forest with nu trees exists");
  }
  return {(1.0 / search.total) * search.accum, search.total, search.count};
}

double w_determinant(const DenseMatrix& l_i, std::span<const double> pi_i) {
  DenseMatrix m = l_i;
  m.set_column(0, pi_i);
  return determinant(m);
}

TreeWeights tree_weights_by_enumeration(const CommunicationDigraph& g,
                                        const BicomponentDecomposition& d, std::size_t cap) {
  TreeWeights tw;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& cls = d.classes[c];
    ClassTreeWeights cw;
    cw.vertices = cls;
    cw.per_root.resize(cls.size());
    for (std::size_t k = 0; k < cls.size(); ++k) {
      cw.per_root[k] = enumerate_out_trees(g, cls, cls[k], cap);
      cw.total += cw.per_root[k];
    }
    Vector pi = cw.per_root;
    for (double& v : pi) v /= cw.total;
    cw.w = w_determinant(class_kirchhoff_from_arcs(restrict(g, cls)), pi);
    tw.classes.push_back(std::move(cw));
  }
  return tw;
}

TreeWeights tree_weights_by_cofactors(const KirchhoffMatrix& l, const BicomponentDecomposition& d) {
  TreeWeights tw;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const auto& cls = d.classes[c];
    const DenseMatrix block = l.entries.select(cls, cls);
    ClassTreeWeights cw;
    cw.vertices = cls;
    cw.per_root.resize(cls.size());
    for (std::size_t k = 0; k < cls.size(); ++k) {
      cw.per_root[k] = cofactor(block, k, k);
      cw.total += cw.per_root[k];
    }
    Vector pi = cw.per_root;
    for (double& v : pi) v /= cw.total;
    cw.w = w_determinant(block, pi);
    tw.classes.push_back(std::move(cw));
  }
  return tw;
}

}  // namespace consensus
