#include <algorithm>
#include <cstdlib>
#include <deque>
#include <string>

#include "lipflat/samplers.hpp"

namespace lipflat {

namespace {

struct SearchPlan {
  std::vector<Vertex> order;                  // BFS order from v0
  std::vector<std::vector<Vertex>> earlier;   // neighbors placed before each vertex
  std::vector<Height> reach;                  // M * dist(v0, v)
};

SearchPlan plan_search(const Graph& g, Vertex v0, FunctionMode mode) {
  const std::size_t n = g.num_vertices();
  if (v0 >= n) throw Error(Errc::invalid_argument, "root out of range");
  if (mode.is_hom() && !g.is_bipartite()) throw Error(Errc::not_bipartite, "homomorphisms need a bipartite graph");
  const auto dist = bfs_distances(g, v0);
  SearchPlan plan;
  std::vector<std::size_t> position(n, kUnreachable);
  std::deque<Vertex> queue{v0};
  position[v0] = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    plan.order.push_back(u);
    for (Vertex w : g.neighbors(u))
      if (position[w] == kUnreachable) {
        position[w] = 1;
        queue.push_back(w);
      }
  }
  if (plan.order.size() != n) throw Error(Errc::not_connected, "enumeration needs a connected graph");
  for (std::size_t i = 0; i < n; ++i) position[plan.order[i]] = i;
  plan.earlier.resize(n);
  plan.reach.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = plan.order[i];
    for (Vertex w : g.neighbors(v))
      if (position[w] < i) plan.earlier[i].push_back(w);
    plan.reach[i] = static_cast<Height>(dist[v]) * mode.slope;
  }
  return plan;
}

}  // namespace

std::uint64_t enumerate_each(const Graph& g, Vertex v0, FunctionMode mode, std::uint64_t cap,
                             const std::function<void(const HeightFunction&)>& visit) {
  if (cap == 0) throw Error(Errc::invalid_argument, "cap must be positive");
  const SearchPlan plan = plan_search(g, v0, mode);
  const std::size_t n = g.num_vertices();
  HeightFunction f{std::vector<Height>(n, 0), v0, mode};
  std::uint64_t count = 0;
  const int slope = mode.slope;

  auto search = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      if (++count > cap) throw Error(Errc::cap_exceeded, "more than " + std::to_string(cap) + " functions");
      visit(f);
      return;
    }
    const Vertex v = plan.order[i];
    if (mode.is_hom()) {
      // BFS order guarantees an earlier neighbor for every vertex but the root.
      const Height first = f.values[plan.earlier[i].front()];
      for (Height x : {first - 1, first + 1}) {
        if (x < -plan.reach[i] || x > plan.reach[i]) continue;
        const bool fits = std::all_of(plan.earlier[i].begin(), plan.earlier[i].end(),
                                      [&](Vertex u) { return std::abs(f.values[u] - x) == 1; });
        if (!fits) continue;
        f.values[v] = x;
        self(self, i + 1);
      }
    } else {
      Height low = -plan.reach[i], high = plan.reach[i];
      for (Vertex u : plan.earlier[i]) {
        low = std::max(low, f.values[u] - slope);
        high = std::min(high, f.values[u] + slope);
      }
      for (Height x = low; x <= high; ++x) {
        f.values[v] = x;
        self(self, i + 1);
      }
    }
    f.values[v] = 0;
  };

  if (n == 1) {
    visit(f);
    return 1;
  }
  // The root is fixed at zero; start from the next vertex in order.
  search(search, 1);
  return count;
}

EnumerationResult enumerate(const Graph& g, Vertex v0, FunctionMode mode, std::uint64_t cap) {
  EnumerationResult result;
  result.count = enumerate_each(g, v0, mode, cap, [&](const HeightFunction& f) { result.functions.push_back(f); });
  std::sort(result.functions.begin(), result.functions.end());
  return result;
}

}  // namespace lipflat
