#include "lipflat/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace lipflat {

bool Graph::has_edge(Vertex u, Vertex v) const {
  if (u >= num_vertices() || v >= num_vertices()) return false;
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Vertex u = 0; u < num_vertices(); ++u)
    for (Vertex v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

namespace {

std::optional<Bipartition> two_coloring(std::size_t n, const std::vector<std::vector<Vertex>>& adj) {
  std::vector<int> color(n, -1);
  for (Vertex start = 0; start < n; ++start) {
    if (color[start] != -1) continue;
    color[start] = 0;
    std::deque<Vertex> queue{start};
    while (!queue.empty()) {
      const Vertex u = queue.front();
      queue.pop_front();
      for (Vertex w : adj[u]) {
        if (color[w] == -1) {
          color[w] = 1 - color[u];
          queue.push_back(w);
        } else if (color[w] == color[u]) {
          return std::nullopt;
        }
      }
    }
  }
  Bipartition parts{VertexSet(n), VertexSet(n), std::vector<std::uint8_t>(n)};
  for (Vertex v = 0; v < n; ++v) {
    parts.color[v] = static_cast<std::uint8_t>(color[v]);
    (color[v] == 0 ? parts.side0 : parts.side1).insert(v);
  }
  return parts;
}

}  // namespace

Graph build_graph(std::size_t n, const std::vector<Edge>& edges, const BuildOptions& options) {
  std::vector<Edge> normalized;
  normalized.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw Error(Errc::invalid_argument, "edge endpoint out of range: " + std::to_string(u) + " " + std::to_string(v));
    if (u == v) throw Error(Errc::self_loop, "vertex " + std::to_string(u));
    normalized.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(normalized.begin(), normalized.end());
  if (auto dup = std::adjacent_find(normalized.begin(), normalized.end()); dup != normalized.end())
    throw Error(Errc::duplicate_edge, std::to_string(dup->first) + " " + std::to_string(dup->second));

  std::vector<std::vector<Vertex>> adj(n);
  for (auto [u, v] : normalized) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adj[v].begin(), adj[v].end());
    g.offsets_[v + 1] = g.offsets_[v] + adj[v].size();
    g.max_degree_ = std::max(g.max_degree_, adj[v].size());
  }
  g.targets_.reserve(2 * normalized.size());
  for (std::size_t v = 0; v < n; ++v) g.targets_.insert(g.targets_.end(), adj[v].begin(), adj[v].end());

  if (n > 0) {
    const std::size_t d0 = adj[0].size();
    if (std::all_of(adj.begin(), adj.end(), [d0](const auto& a) { return a.size() == d0; })) g.degree_ = d0;
  }

  if (options.first_class_size) {
    const std::size_t n0 = *options.first_class_size;
    if (n0 > n) throw Error(Errc::invalid_argument, "bipartite class size exceeds vertex count");
    Bipartition parts{VertexSet(n), VertexSet(n), std::vector<std::uint8_t>(n)};
    for (Vertex v = 0; v < n; ++v) {
      parts.color[v] = v < n0 ? 0 : 1;
      (v < n0 ? parts.side0 : parts.side1).insert(v);
    }
    for (auto [u, v] : normalized)
      if (parts.color[u] == parts.color[v])
        throw Error(Errc::odd_cycle, "edge " + std::to_string(u) + " " + std::to_string(v) + " inside a declared class");
    g.bipartition_ = std::move(parts);
  } else if (options.two_color) {
    g.bipartition_ = two_coloring(n, adj);
    if (!g.bipartition_) throw Error(Errc::odd_cycle, "graph is not 2-colorable");
  }

  g.root_ = options.root;
  g.leaves_ = options.leaves;
  std::sort(g.leaves_.begin(), g.leaves_.end());
  g.glue_vertex_ = options.glue_vertex;
  g.tree_arity_ = options.tree_arity;
  g.glued_leaf_count_ = options.glued_leaf_count;
  return g;
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return build_graph(n, edges);
}

Graph cycle_graph(std::size_t n, bool two_color) {
  if (n < 3) throw Error(Errc::invalid_argument, "cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u) edges.emplace_back(u, static_cast<Vertex>((u + 1) % n));
  BuildOptions options;
  options.two_color = two_color;
  return build_graph(n, edges, options);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  BuildOptions options;
  options.two_color = true;
  return build_graph(n, edges, options);
}

Graph complete_bipartite(std::size_t m) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < m; ++u)
    for (Vertex v = 0; v < m; ++v) edges.emplace_back(u, static_cast<Vertex>(m + v));
  BuildOptions options;
  options.first_class_size = m;
  return build_graph(2 * m, edges, options);
}

Graph hypercube(std::size_t dim) {
  const std::size_t n = std::size_t{1} << dim;
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (std::size_t b = 0; b < dim; ++b) {
      const Vertex v = u ^ static_cast<Vertex>(std::size_t{1} << b);
      if (u < v) edges.emplace_back(u, v);
    }
  BuildOptions options;
  options.two_color = true;
  return build_graph(n, edges, options);
}

Graph gen_tree(std::size_t d, std::size_t h, bool glued) {
  if (d < 3 || h < 1) throw Error(Errc::invalid_argument, "tree needs d >= 3 and h >= 1");
  // levels[j] = first id and count of vertices at depth j
  std::vector<std::size_t> first{0}, count{1};
  for (std::size_t depth = 1; depth <= h; ++depth) {
    first.push_back(first.back() + count.back());
    count.push_back(count.back() * (depth == 1 ? d : d - 1));
  }
  const std::size_t internal = first[h];
  const std::size_t leaves = count[h];

  std::vector<Edge> edges;
  BuildOptions options;
  options.two_color = true;
  options.root = 0;
  options.tree_arity = d;
  options.glued_leaf_count = glued ? leaves : 0;
  for (std::size_t depth = 1; depth <= h; ++depth) {
    const std::size_t children = depth == 1 ? d : d - 1;
    for (std::size_t i = 0; i < count[depth - 1]; ++i) {
      const auto parent = static_cast<Vertex>(first[depth - 1] + i);
      if (glued && depth == h) {
        edges.emplace_back(parent, static_cast<Vertex>(internal));
        continue;
      }
      for (std::size_t c = 0; c < children; ++c)
        edges.emplace_back(parent, static_cast<Vertex>(first[depth] + i * children + c));
    }
  }
  if (glued) {
    options.glue_vertex = static_cast<Vertex>(internal);
    return build_graph(internal + 1, edges, options);
  }
  for (std::size_t i = 0; i < leaves; ++i) options.leaves.push_back(static_cast<Vertex>(internal + i));
  return build_graph(internal + leaves, edges, options);
}

std::vector<std::size_t> distances_to_set(const Graph& g, const VertexSet& sources) {
  std::vector<std::size_t> dist(g.num_vertices(), kUnreachable);
  std::vector<Vertex> frontier = sources.members();
  for (Vertex s : frontier) dist[s] = 0;
  std::size_t level = 0;
  while (!frontier.empty()) {
    std::vector<Vertex> next;
    ++level;
    for (Vertex u : frontier)
      for (Vertex w : g.neighbors(u))
        if (dist[w] == kUnreachable) {
          dist[w] = level;
          next.push_back(w);
        }
    frontier.swap(next);
  }
  return dist;
}

std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source) {
  return distances_to_set(g, VertexSet(g.num_vertices(), {source}));
}

bool is_connected(const Graph& g) {
  if (g.num_vertices() == 0) return true;
  auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](std::size_t x) { return x == kUnreachable; });
}

std::size_t diameter(const Graph& g) {
  std::size_t best = 0;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    for (std::size_t x : bfs_distances(g, v)) {
      if (x == kUnreachable) return kUnreachable;
      best = std::max(best, x);
    }
  }
  return best;
}

VertexSet ball(const Graph& g, Vertex v, std::size_t radius) {
  if (v >= g.num_vertices()) throw Error(Errc::invalid_argument, "ball center out of range");
  VertexSet out(g.num_vertices(), {v});
  std::vector<Vertex> frontier{v};
  for (std::size_t r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Vertex> next;
    for (Vertex u : frontier)
      for (Vertex w : g.neighbors(u))
        if (!out.contains(w)) {
          out.insert(w);
          next.push_back(w);
        }
    frontier.swap(next);
  }
  return out;
}

VertexSet neighborhood(const Graph& g, const VertexSet& set) {
  VertexSet out(g.num_vertices());
  set.for_each([&](Vertex a) {
    for (Vertex w : g.neighbors(a)) out.insert(w);
  });
  return out;
}

Boundary boundary(const Graph& g, const VertexSet& set) {
  VertexSet n1 = neighborhood(g, set);
  VertexSet outer = n1 - set;
  VertexSet outer2 = neighborhood(g, n1) - (set | n1);
  return {std::move(n1), std::move(outer), std::move(outer2)};
}

VertexSet component_in_square(const Graph& g, Vertex v, const VertexSet& within) {
  if (!within.contains(v)) throw Error(Errc::precondition, "start vertex not in the inducing set");
  VertexSet comp(g.num_vertices(), {v});
  std::vector<Vertex> stack{v};
  auto visit = [&](Vertex w) {
    if (within.contains(w) && !comp.contains(w)) {
      comp.insert(w);
      stack.push_back(w);
    }
  };
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(u)) {
      visit(w);
      for (Vertex z : g.neighbors(w)) visit(z);
    }
  }
  return comp;
}

Graph square_graph(const Graph& g) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    std::vector<Vertex> reach;
    for (Vertex w : g.neighbors(u)) {
      reach.push_back(w);
      for (Vertex z : g.neighbors(w)) reach.push_back(z);
    }
    std::sort(reach.begin(), reach.end());
    reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
    for (Vertex w : reach)
      if (u < w) edges.emplace_back(u, w);
  }
  return build_graph(g.num_vertices(), edges);
}

namespace {

// Enumerates each connected set containing the seed exactly once: a branch either
// takes candidate u or excludes it for all later siblings.
class ConnectedSetCounter {
 public:
  ConnectedSetCounter(const Graph& g, std::size_t target, std::uint64_t budget)
      : g_(g), target_(target), budget_(budget), state_(g.num_vertices(), kFree) {}

  std::uint64_t run(Vertex seed) {
    state_[seed] = kInSet;
    std::vector<Vertex> cand;
    for (Vertex w : g_.neighbors(seed)) {
      state_[w] = kCandidate;
      cand.push_back(w);
    }
    grow(1, cand);
    return count_;
  }

 private:
  enum : std::uint8_t { kFree, kInSet, kCandidate, kExcluded };

  void grow(std::size_t size, const std::vector<Vertex>& cand) {
    if (++nodes_ > budget_) throw Error(Errc::budget_exceeded, "connected-set enumeration");
    if (size == target_) {
      ++count_;
      return;
    }
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const Vertex u = cand[i];
      std::vector<Vertex> next(cand.begin() + static_cast<std::ptrdiff_t>(i) + 1, cand.end());
      const std::size_t inherited = next.size();
      state_[u] = kInSet;
      for (Vertex w : g_.neighbors(u))
        if (state_[w] == kFree) {
          state_[w] = kCandidate;
          next.push_back(w);
        }
      grow(size + 1, next);
      for (std::size_t j = inherited; j < next.size(); ++j) state_[next[j]] = kFree;
      state_[u] = kExcluded;
    }
    for (Vertex u : cand) state_[u] = kCandidate;
  }

  const Graph& g_;
  std::size_t target_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::uint64_t count_ = 0;
  std::vector<std::uint8_t> state_;
};

}  // namespace

std::uint64_t count_connected_sets(const Graph& g, Vertex v, std::size_t a, bool square, std::uint64_t budget) {
  if (a == 0) throw Error(Errc::invalid_argument, "set size must be positive");
  if (v >= g.num_vertices()) throw Error(Errc::invalid_argument, "vertex out of range");
  if (square) {
    const Graph sq = square_graph(g);
    return ConnectedSetCounter(sq, a, budget).run(v);
  }
  return ConnectedSetCounter(g, a, budget).run(v);
}

}  // namespace lipflat
