#include <algorithm>
#include <numeric>
#include <string>

#include "lipflat/graph.hpp"
#include "lipflat/rng.hpp"

namespace lipflat {

namespace {

bool adjacent(const std::vector<std::vector<Vertex>>& adj, Vertex a, Vertex b) {
  const auto& smaller = adj[a].size() <= adj[b].size() ? adj[a] : adj[b];
  const Vertex other = adj[a].size() <= adj[b].size() ? b : a;
  return std::find(smaller.begin(), smaller.end(), other) != smaller.end();
}

// One pairing attempt. Points are drawn two at a time; a pair that would form a loop or
// parallel edge is redrawn. Returns false when the remaining points admit no legal pair.
bool try_pairing(std::size_t n, std::size_t d, Rng& rng, std::vector<Edge>& edges) {
  std::vector<Vertex> points;
  points.reserve(n * d);
  for (Vertex v = 0; v < n; ++v) points.insert(points.end(), d, v);
  std::vector<std::vector<Vertex>> adj(n);
  edges.clear();

  auto take = [&](std::size_t i, std::size_t j) {
    const Vertex a = points[i], b = points[j];
    adj[a].push_back(b);
    adj[b].push_back(a);
    edges.emplace_back(std::min(a, b), std::max(a, b));
    const std::size_t hi = std::max(i, j), lo = std::min(i, j);
    points[hi] = points.back();
    points.pop_back();
    points[lo] = points.back();
    points.pop_back();
  };

  while (!points.empty()) {
    bool paired = false;
    for (int attempt = 0; attempt < 64 && !paired; ++attempt) {
      const auto i = static_cast<std::size_t>(rng.below(points.size()));
      const auto j = static_cast<std::size_t>(rng.below(points.size()));
      if (i == j || points[i] == points[j] || adjacent(adj, points[i], points[j])) continue;
      take(i, j);
      paired = true;
    }
    if (paired) continue;
    std::vector<std::pair<std::size_t, std::size_t>> legal;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (points[i] != points[j] && !adjacent(adj, points[i], points[j])) legal.emplace_back(i, j);
    if (legal.empty()) return false;
    const auto pick = legal[static_cast<std::size_t>(rng.below(legal.size()))];
    take(pick.first, pick.second);
  }
  return true;
}

}  // namespace

Graph gen_random_regular(std::size_t n, std::size_t d, std::uint64_t seed, const GeneratorOptions& options) {
  if ((n * d) % 2 != 0) throw Error(Errc::parity, "n*d must be even");
  if (d >= n) throw Error(Errc::invalid_argument, "degree must be smaller than n");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t attempt = 0; attempt < options.retry_budget; ++attempt) {
    if (!try_pairing(n, d, rng, edges)) continue;
    Graph g = build_graph(n, edges);
    if (options.connected && !is_connected(g)) continue;
    return g;
  }
  throw Error(Errc::retry_exhausted, "random regular n=" + std::to_string(n) + " d=" + std::to_string(d));
}

Graph gen_random_bipartite_regular(std::size_t n, std::size_t d, std::uint64_t seed, const GeneratorOptions& options) {
  if (d > n) throw Error(Errc::invalid_argument, "degree must not exceed class size");
  BuildOptions build;
  build.first_class_size = n;
  if (d == n) return complete_bipartite(n);

  constexpr std::size_t kMatchingTries = 100'000;
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < options.retry_budget; ++attempt) {
    std::vector<std::vector<Vertex>> partner(n);  // V0 index -> V1 indices used
    std::vector<Edge> edges;
    bool ok = true;
    for (std::size_t m = 0; m < d && ok; ++m) {
      std::vector<Vertex> perm(n);
      std::iota(perm.begin(), perm.end(), Vertex{0});
      bool placed = false;
      for (std::size_t tries = 0; tries < kMatchingTries && !placed; ++tries) {
        shuffle(perm, rng);
        placed = true;
        for (std::size_t i = 0; i < n && placed; ++i)
          if (std::find(partner[i].begin(), partner[i].end(), perm[i]) != partner[i].end()) placed = false;
      }
      if (!placed) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) {
        partner[i].push_back(perm[i]);
        edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(n + perm[i]));
      }
    }
    if (!ok) continue;
    Graph g = build_graph(2 * n, edges, build);
    if (options.connected && !is_connected(g)) continue;
    return g;
  }
  throw Error(Errc::retry_exhausted, "random bipartite regular n=" + std::to_string(n) + " d=" + std::to_string(d));
}

}  // namespace lipflat
