#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipflat/vertex_set.hpp"

namespace lipflat {

using Edge = std::pair<Vertex, Vertex>;

struct Bipartition {
  VertexSet side0;
  VertexSet side1;
  std::vector<std::uint8_t> color;  // color[v] in {0, 1}
};

struct BuildOptions {
  // Compute a bipartition by BFS 2-coloring (lowest id of each component gets class 0).
  bool two_color = false;
  // Declare V0 = {0..n0-1}, V1 = the rest; edges must cross.
  std::optional<std::size_t> first_class_size;
  std::optional<Vertex> root;
  std::vector<Vertex> leaves;
  std::optional<Vertex> glue_vertex;
  std::optional<std::size_t> tree_arity;
  // Number of tree leaves identified into the glue vertex (its multigraph degree).
  std::size_t glued_leaf_count = 0;
};

// Immutable simple undirected graph in compressed adjacency form.
class Graph {
 public:
  Graph() = default;

  std::size_t num_vertices() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree_of(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const noexcept { return max_degree_; }
  // Common degree when every vertex has the same number of neighbors.
  std::optional<std::size_t> degree() const noexcept { return degree_; }
  bool has_edge(Vertex u, Vertex v) const;

  const std::optional<Bipartition>& bipartition() const noexcept { return bipartition_; }
  bool is_bipartite() const noexcept { return bipartition_.has_value(); }
  int side(Vertex v) const { return bipartition_->color[v]; }

  std::optional<Vertex> root() const noexcept { return root_; }
  const std::vector<Vertex>& leaves() const noexcept { return leaves_; }
  std::optional<Vertex> glue_vertex() const noexcept { return glue_vertex_; }
  std::optional<std::size_t> tree_arity() const noexcept { return tree_arity_; }
  std::size_t glued_leaf_count() const noexcept { return glued_leaf_count_; }

  // Edges as (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  friend Graph build_graph(std::size_t n, const std::vector<Edge>& edges, const BuildOptions& options);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
  std::size_t max_degree_ = 0;
  std::optional<std::size_t> degree_;
  std::optional<Bipartition> bipartition_;
  std::optional<Vertex> root_;
  std::vector<Vertex> leaves_;
  std::optional<Vertex> glue_vertex_;
  std::optional<std::size_t> tree_arity_;
  std::size_t glued_leaf_count_ = 0;
};

Graph build_graph(std::size_t n, const std::vector<Edge>& edges, const BuildOptions& options = {});

// ---- deterministic fixtures ----
Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n, bool two_color = false);
Graph path_graph(std::size_t n);
Graph complete_bipartite(std::size_t m);
Graph hypercube(std::size_t dim);

// ---- random generators ----
struct GeneratorOptions {
  bool connected = true;
  std::size_t retry_budget = 100;
};

// Simple d-regular graph on n vertices from the pairing model, rejecting loops and
// parallel pairs as they are drawn.
Graph gen_random_regular(std::size_t n, std::size_t d, std::uint64_t seed, const GeneratorOptions& options = {});

// d-regular bipartite graph on V0 = {0..n-1}, V1 = {n..2n-1} as d edge-disjoint random
// perfect matchings.
Graph gen_random_bipartite_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                                   const GeneratorOptions& options = {});

// Complete (d-1)-ary tree of height h with root degree d, numbered breadth-first from
// the root (vertex 0). When glued, every leaf is replaced by a single last vertex.
Graph gen_tree(std::size_t d, std::size_t h, bool glued);

// ---- metric and boundary primitives ----
inline constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);

std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source);
std::vector<std::size_t> distances_to_set(const Graph& g, const VertexSet& sources);
bool is_connected(const Graph& g);
// kUnreachable for disconnected graphs.
std::size_t diameter(const Graph& g);

VertexSet ball(const Graph& g, Vertex v, std::size_t radius);
VertexSet neighborhood(const Graph& g, const VertexSet& set);

struct Boundary {
  VertexSet neighborhood;  // N(A)
  VertexSet outer;         // N(A) \ A
  VertexSet outer2;        // N(N(A)) \ (A u N(A))
};
Boundary boundary(const Graph& g, const VertexSet& set);

// Component of v in the distance-at-most-2 graph restricted to `within`.
VertexSet component_in_square(const Graph& g, Vertex v, const VertexSet& within);

// The graph joining vertices at distance 1 or 2.
Graph square_graph(const Graph& g);

// Number of connected vertex sets of size a containing v (in G, or in G^{<=2} when
// `square`). Throws budget_exceeded after `budget` recursion nodes.
std::uint64_t count_connected_sets(const Graph& g, Vertex v, std::size_t a, bool square,
                                   std::uint64_t budget = 100'000'000);

// ---- text format ----
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in, bool two_color = false);
Graph load_graph(const std::string& path, bool two_color = false);
void save_graph(const std::string& path, const Graph& g);

}  // namespace lipflat
