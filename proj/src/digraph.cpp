#include "consensus/digraph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <queue>
#include <sstream>

namespace consensus {

namespace {

constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

// Iterative Tarjan; components come out in reverse topological order of the
// condensation, which callers do not rely on.
std::vector<std::vector<std::size_t>> strong_components(const CommunicationDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t vertex;
    std::size_t next_arc;
  };
  std::vector<Frame> call;

  for (std::size_t start = 0; start < n; ++start) {
    if (index[start] != kUnvisited) continue;
    call.push_back({start, 0});
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const auto& out = g.out_arcs(f.vertex);
      if (f.next_arc < out.size()) {
        const std::size_t w = out[f.next_arc++].target;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.vertex] = std::min(low[f.vertex], index[w]);
        }
        continue;
      }
      const std::size_t v = f.vertex;
      call.pop_back();
      if (!call.empty()) low[call.back().vertex] = std::min(low[call.back().vertex], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> pos(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) pos[perm[k]] = k;
  return pos;
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", w);
  return buf;
}

}  // namespace

CommunicationDigraph::CommunicationDigraph(std::size_t n, std::vector<Arc> arcs)
    : n_(n), arcs_(std::move(arcs)), in_(n), out_(n) {
  std::sort(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  for (const Arc& a : arcs_) {
    if (a.source >= n || a.target >= n) {
      throw Error(Errc::DimensionMismatch, "arc endpoint out of range");
    }
    out_[a.source].push_back(a);
    in_[a.target].push_back(a);
  }
}

std::vector<std::size_t> BicomponentDecomposition::basic_vertices() const {
  return {permutation.begin(), permutation.begin() + static_cast<std::ptrdiff_t>(b)};
}

std::vector<std::size_t> BicomponentDecomposition::nonbasic_vertices() const {
  return {permutation.begin() + static_cast<std::ptrdiff_t>(b), permutation.end()};
}

std::vector<std::size_t> BicomponentDecomposition::positions() const {
  return invert_permutation(permutation);
}

const char* spectral_kind_name(SpectralKind kind) noexcept {
  switch (kind) {
    case SpectralKind::Regular: return "regular";
    case SpectralKind::ProperNotRegular: return "proper_not_regular";
    case SpectralKind::Improper: return "improper";
  }
  return "unknown";
}

DigraphBuild build(const StochasticMatrix& p, const ToleranceConfig& tol) {
  const std::size_t n = p.size();
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p(i, j) > tol.zero_tol) arcs.push_back({j, i, p(i, j)});

  KirchhoffMatrix l{DenseMatrix::identity(n) - p.matrix()};
  return {CommunicationDigraph(n, std::move(arcs)), std::move(l)};
}

BicomponentDecomposition decompose(const CommunicationDigraph& g) {
  const std::size_t n = g.size();
  auto components = strong_components(g);
  const std::size_t count = components.size();

  std::vector<std::size_t> comp_of(n);
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t v : components[c]) comp_of[v] = c;

  // Condensation arcs between distinct components.
  std::vector<std::vector<std::size_t>> succ(count);
  std::vector<std::size_t> in_degree(count, 0);
  for (const Arc& a : g.arcs()) {
    const std::size_t cs = comp_of[a.source];
    const std::size_t ct = comp_of[a.target];
    if (cs == ct) continue;
    if (std::find(succ[cs].begin(), succ[cs].end(), ct) == succ[cs].end()) {
      succ[cs].push_back(ct);
      ++in_degree[ct];
    }
  }

  std::vector<std::size_t> basic;
  std::vector<std::size_t> nonbasic_order;
  for (std::size_t c = 0; c < count; ++c)
    if (in_degree[c] == 0) basic.push_back(c);
  auto by_min_vertex = [&](std::size_t a, std::size_t b) {
    return components[a].front() < components[b].front();
  };
  std::sort(basic.begin(), basic.end(), by_min_vertex);

  // Kahn's algorithm over the condensation; basic components are released
  // first, nonbasic ones are emitted in the order they become available.
  auto cmp = [&](std::size_t a, std::size_t b) { return by_min_vertex(b, a); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
  std::vector<std::size_t> remaining = in_degree;
  for (std::size_t c : basic)
    for (std::size_t t : succ[c])
      if (--remaining[t] == 0) ready.push(t);
  while (!ready.empty()) {
    const std::size_t c = ready.top();
    ready.pop();
    nonbasic_order.push_back(c);
    for (std::size_t t : succ[c])
      if (--remaining[t] == 0) ready.push(t);
  }

  BicomponentDecomposition d;
  d.class_of.assign(n, 0);
  d.index_in_class.assign(n, 0);
  auto append = [&](std::size_t c, bool is_basic) {
    const std::size_t id = d.classes.size();
    for (std::size_t k = 0; k < components[c].size(); ++k) {
      const std::size_t v = components[c][k];
      d.class_of[v] = id;
      d.index_in_class[v] = k;
      d.permutation.push_back(v);
    }
    d.classes.push_back(components[c]);
    d.is_basic.push_back(is_basic);
  };
  for (std::size_t c : basic) {
    append(c, true);
    d.b += components[c].size();
  }
  for (std::size_t c : nonbasic_order) append(c, false);
  d.nu = basic.size();
  return d;
}

std::size_t class_period(const CommunicationDigraph& g, std::span<const std::size_t> cls) {
  if (cls.empty()) throw Error(Errc::NotStronglyConnected, "empty class");
  const std::size_t n = g.size();
  std::vector<bool> member(n, false);
  for (std::size_t v : cls) member[v] = true;

  auto reach = [&](bool forward) {
    std::vector<std::size_t> level(n, kUnvisited);
    std::queue<std::size_t> q;
    level[cls.front()] = 0;
    q.push(cls.front());
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      const auto& arcs = forward ? g.out_arcs(v) : g.in_arcs(v);
      for (const Arc& a : arcs) {
        const std::size_t w = forward ? a.target : a.source;
        if (!member[w] || level[w] != kUnvisited) continue;
        level[w] = level[v] + 1;
        q.push(w);
      }
    }
    return level;
  };

  const auto level = reach(true);
  const auto back = reach(false);
  for (std::size_t v : cls) {
    if (level[v] == kUnvisited || back[v] == kUnvisited) {
      throw Error(Errc::NotStronglyConnected,
                  "vertex " + std::to_string(v + 1) + " is not mutually reachable in the class");
    }
  }

  std::size_t period = 0;
  for (std::size_t v : cls) {
    for (const Arc& a : g.out_arcs(v)) {
      if (!member[a.target]) continue;
      const auto lhs = static_cast<long long>(level[v]) + 1;
      const auto rhs = static_cast<long long>(level[a.target]);
      period = std::gcd(period, static_cast<std::size_t>(lhs > rhs ? lhs - rhs : rhs - lhs));
    }
  }
  // 0 when the class has no internal arc (a single vertex without a loop).
  return period;
}

SpectralClass spectral_class(const CommunicationDigraph& g, const BicomponentDecomposition& d) {
  SpectralClass sc{SpectralKind::ProperNotRegular, {}};
  bool proper = true;
  for (std::size_t c = 0; c < d.nu; ++c) {
    const std::size_t period = class_period(g, d.classes[c]);
    sc.periods.push_back(period);
    if (period != 1) proper = false;
  }
  if (!proper) {
    sc.kind = SpectralKind::Improper;
  } else if (d.nu == 1) {
    sc.kind = SpectralKind::Regular;
  }
  return sc;
}

void require_proper(const BicomponentDecomposition& d, const SpectralClass& spectral) {
  for (std::size_t c = 0; c < spectral.periods.size(); ++c) {
    if (spectral.periods[c] != 1) throw ImproperMatrix(d.classes[c], spectral.periods[c]);
  }
}

DenseMatrix permute_to_frobenius(const DenseMatrix& m, const BicomponentDecomposition& d) {
  return m.select(d.permutation, d.permutation);
}

DenseMatrix permute_from_frobenius(const DenseMatrix& m, const BicomponentDecomposition& d) {
  const auto pos = d.positions();
  return m.select(pos, pos);
}

std::string export_dot(const CommunicationDigraph& g, const BicomponentDecomposition& d,
                       std::span<const std::string> labels) {
  auto name = [&](std::size_t v) {
    if (!labels.empty()) {
      std::string quoted = "\"";
      for (char ch : labels[v]) {
        if (ch == '"' || ch == '\\') quoted += '\\';
        quoted += ch;
      }
      return quoted + "\"";
    }
    return std::to_string(v + 1);
  };

  std::ostringstream os;
  os << "digraph influence {\n";
  for (std::size_t c = 0; c < d.classes.size(); ++c) {
    const bool basic = d.is_basic[c];
    os << "  subgraph cluster_" << c + 1 << " {\n";
    os << "    label=\"class " << c + 1 << (basic ? " (basic)" : " (nonbasic)") << "\";\n";
    os << "    style=" << (basic ? "\"filled\"" : "\"dashed\"") << ";\n";
    if (basic) os << "    fillcolor=\"lightgrey\";\n";
    for (std::size_t v : d.classes[c]) os << "    " << name(v) << ";\n";
    os << "  }\n";
  }
  for (const Arc& a : g.arcs()) {
    os << "  " << name(a.source) << " -> " << name(a.target) << " [label=\""
       << format_weight(a.weight) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace consensus
