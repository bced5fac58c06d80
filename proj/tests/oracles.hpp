#pragma once
// Independent reference implementations used only by tests. They share no code with the
// library beyond the Graph container.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "lipflat/graph.hpp"

namespace oracle {

using lipflat::Graph;
using lipflat::Vertex;

inline std::vector<std::vector<int>> adjacency_matrix(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (auto [u, v] : g.edges()) a[u][v] = a[v][u] = 1;
  return a;
}

// Plain 4^n (general) or 4^m (bipartite) search over all pairs of masks.
inline double naive_lambda(const Graph& g, bool bipartite) {
  const auto a = adjacency_matrix(g);
  const std::size_t total = g.num_vertices();
  const double d = static_cast<double>(g.degree().value());
  std::vector<Vertex> left, right;
  for (Vertex v = 0; v < total; ++v) {
    if (!bipartite || g.side(v) == 0) left.push_back(v);
    if (!bipartite || g.side(v) == 1) right.push_back(v);
  }
  const double n = static_cast<double>(bipartite ? left.size() : total);
  double best = 0.0;
  for (std::uint32_t s = 1; s < (1U << left.size()); ++s) {
    for (std::uint32_t t = 1; t < (1U << right.size()); ++t) {
      long long e = 0;
      for (std::size_t i = 0; i < left.size(); ++i) {
        if (!((s >> i) & 1U)) continue;
        for (std::size_t j = 0; j < right.size(); ++j)
          if ((t >> j) & 1U) e += a[left[i]][right[j]];
      }
      const double ss = std::popcount(s), tt = std::popcount(t);
      best = std::max(best, std::abs(static_cast<double>(e) - d / n * ss * tt) / std::sqrt(ss * tt));
    }
  }
  return best;
}

// Dense eigen-decomposition: second singular value of the biadjacency, or the largest
// |eigenvalue| after removing the top one.
inline double dense_lambda(const Graph& g, bool bipartite) {
  const std::size_t total = g.num_vertices();
  if (bipartite) {
    std::vector<Vertex> left, right;
    for (Vertex v = 0; v < total; ++v) (g.side(v) == 0 ? left : right).push_back(v);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(left.size()), static_cast<Eigen::Index>(right.size()));
    for (std::size_t i = 0; i < left.size(); ++i)
      for (std::size_t j = 0; j < right.size(); ++j)
        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.has_edge(left[i], right[j]) ? 1.0 : 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    return svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  for (auto [u, v] : g.edges()) a(u, v) = a(v, u) = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  auto values = solver.eigenvalues();  // ascending
  const auto last = values.size() - 1;
  return std::max(std::abs(values(0)), std::abs(values(last - 1)));
}

inline bool connected_within(const Graph& g, const std::vector<Vertex>& members, bool square) {
  if (members.empty()) return true;
  std::vector<bool> in(g.num_vertices(), false), seen(g.num_vertices(), false);
  for (Vertex v : members) in[v] = true;
  std::deque<Vertex> queue{members.front()};
  seen[members.front()] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : members) {
      if (seen[w]) continue;
      bool near = g.has_edge(u, w);
      if (!near && square)
        for (Vertex x : g.neighbors(u)) near = near || g.has_edge(x, w);
      if (near) {
        seen[w] = true;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  return reached == members.size();
}

// Subsets of size a containing v that are connected (in G or G^{<=2}); 2^n subsets.
inline std::uint64_t brute_connected_sets(const Graph& g, Vertex v, std::size_t a, bool square) {
  const std::size_t n = g.num_vertices();
  std::uint64_t count = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (!((mask >> v) & 1U) || static_cast<std::size_t>(std::popcount(mask)) != a) continue;
    std::vector<Vertex> members;
    for (Vertex w = 0; w < n; ++w)
      if ((mask >> w) & 1U) members.push_back(w);
    if (connected_within(g, members, square)) ++count;
  }
  return count;
}

// Assignment search in vertex-id order over [-slope*e, slope*e] (e = eccentricity of
// the root), rejecting a partial assignment as soon as an edge to a lower id fails.
// Keeps valid height functions pinned at `root` and zero on `zeros`.
inline std::vector<std::vector<int>> brute_family(const Graph& g, Vertex root, int slope, bool hom,
                                                  const std::vector<Vertex>& zeros = {}) {
  const std::size_t n = g.num_vertices();
  std::vector<int> dist(n, -1);
  std::deque<Vertex> queue{root};
  dist[root] = 0;
  int ecc = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    ecc = std::max(ecc, dist[u]);
    for (Vertex w : g.neighbors(u))
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  const int span = slope * ecc;
  std::vector<bool> pinned(n, false);
  pinned[root] = true;
  for (Vertex z : zeros) pinned[z] = true;

  std::vector<int> values(n, 0);
  std::vector<std::vector<int>> out;
  auto fits = [&](Vertex v) {
    for (Vertex u = 0; u < v; ++u) {
      if (!g.has_edge(u, v)) continue;
      const int diff = std::abs(values[u] - values[v]);
      if (hom ? diff != 1 : diff > slope) return false;
    }
    return true;
  };
  auto search = [&](auto&& self, Vertex v) -> void {
    if (v == n) {
      out.push_back(values);
      return;
    }
    const int lo = pinned[v] ? 0 : -span, hi = pinned[v] ? 0 : span;
    for (int x = lo; x <= hi; ++x) {
      values[v] = x;
      if (fits(v)) self(self, v + 1);
    }
    values[v] = 0;
  };
  search(search, 0);
  return out;
}

}  // namespace oracle
