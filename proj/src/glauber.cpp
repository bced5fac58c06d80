#include <algorithm>
#include <cmath>
#include <limits>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "lipflat/samplers.hpp"

namespace lipflat {

AllowedRange allowed_values(const Graph& g, const HeightFunction& f, Vertex v) {
  AllowedRange range;
  auto nbrs = g.neighbors(v);
  if (nbrs.empty()) throw Error(Errc::precondition, "isolated vertex has an unbounded allowed set");
  if (f.mode.is_hom()) {
    Height lo = std::numeric_limits<Height>::max(), hi = std::numeric_limits<Height>::min();
    for (Vertex u : nbrs) {
      lo = std::min(lo, f[u]);
      hi = std::max(hi, f[u]);
    }
    range.stride = 2;
    if (lo == hi) {
      range.low = lo - 1;
      range.high = lo + 1;
    } else if (hi - lo == 2) {
      range.low = range.high = lo + 1;
    }
    return range;
  }
  range.low = std::numeric_limits<Height>::min();
  range.high = std::numeric_limits<Height>::max();
  for (Vertex u : nbrs) {
    range.low = std::max(range.low, f[u] - f.mode.slope);
    range.high = std::min(range.high, f[u] + f.mode.slope);
  }
  return range;
}

HeightFunction initial_state(const Graph& g, Vertex v0, FunctionMode mode) {
  HeightFunction f{std::vector<Height>(g.num_vertices(), 0), v0, mode};
  if (mode.is_hom()) {
    if (!g.is_bipartite()) throw Error(Errc::not_bipartite, "homomorphisms need a bipartite graph");
    for (Vertex v = 0; v < g.num_vertices(); ++v) f.values[v] = g.side(v) == g.side(v0) ? 0 : 1;
  }
  return f;
}

void glauber_step(const Graph& g, ChainState& state) {
  const std::size_t n = g.num_vertices();
  if (n < 2) {
    ++state.step;
    return;
  }
  const unsigned __int128 product = static_cast<unsigned __int128>(state.rng.next()) * (n - 1);
  auto pick = static_cast<Vertex>(product >> 64);
  if (pick >= state.f.root) ++pick;  // skip the pinned root
  const AllowedRange range = allowed_values(g, state.f, pick);
  const std::size_t size = range.size();
  if (size == 0 || !range.contains(state.f[pick]))
    throw Error(Errc::precondition, "state is not valid at vertex " + std::to_string(pick));
  const auto low = static_cast<std::uint64_t>(product);
  const auto index = static_cast<std::size_t>((static_cast<unsigned __int128>(low) * size) >> 64);
  state.f.values[pick] = range.at(index);
  ++state.step;
}

double transition_probability(const Graph& g, const HeightFunction& f, const HeightFunction& h) {
  const std::size_t n = g.num_vertices();
  std::size_t differing = 0;
  Vertex where = 0;
  for (Vertex v = 0; v < n; ++v)
    if (f[v] != h[v]) {
      ++differing;
      where = v;
    }
  const double pick = 1.0 / static_cast<double>(n - 1);
  if (differing > 1 || (differing == 1 && where == f.root)) return 0.0;
  if (differing == 1) {
    const AllowedRange range = allowed_values(g, f, where);
    return range.contains(h[where]) ? pick / static_cast<double>(range.size()) : 0.0;
  }
  double stay = 0.0;
  for (Vertex v = 0; v < n; ++v)
    if (v != f.root) stay += pick / static_cast<double>(allowed_values(g, f, v).size());
  return stay;
}

bool transition_graph_connected(const Graph& g, const std::vector<HeightFunction>& states) {
  if (states.empty()) return true;
  std::map<std::vector<Height>, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i].values, i);
  std::vector<bool> seen(states.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    HeightFunction f = states[stack.back()];
    stack.pop_back();
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      if (v == f.root) continue;
      const AllowedRange range = allowed_values(g, f, v);
      const Height keep = f[v];
      for (std::size_t i = 0; i < range.size(); ++i) {
        f.values[v] = range.at(i);
        const auto it = index.find(f.values);
        if (it == index.end())
          throw Error(Errc::precondition, "state set is not closed under single-site moves");
        if (!seen[it->second]) {
          seen[it->second] = true;
          ++reached;
          stack.push_back(it->second);
        }
      }
      f.values[v] = keep;
    }
  }
  return reached == states.size();
}

void mcmc_run(const Graph& g, Vertex v0, FunctionMode mode, const McmcOptions& options,
              const std::function<void(std::size_t, std::uint64_t, const HeightFunction&)>& visit) {
  if (options.thin == 0 || options.chains == 0) throw Error(Errc::invalid_argument, "thin and chains must be positive");
  if (v0 >= g.num_vertices()) throw Error(Errc::invalid_argument, "root out of range");
  const HeightFunction start = initial_state(g, v0, mode);

  auto run_chain = [&](std::size_t chain) {
    ChainState state{start, 0, Rng(options.seed, chain)};
    for (std::uint64_t i = 0; i < options.burnin; ++i) glauber_step(g, state);
    for (std::uint64_t s = 0; s < options.samples; ++s) {
      for (std::uint64_t i = 0; i < options.thin; ++i) glauber_step(g, state);
      visit(chain, s, state.f);
    }
  };

  const unsigned workers = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(options.chains)));
  if (workers == 1) {
    for (std::size_t c = 0; c < options.chains; ++c) run_chain(c);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_lock;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < options.chains; c += workers) run_chain(c);
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<HeightFunction> mcmc_sample(const Graph& g, Vertex v0, FunctionMode mode, const McmcOptions& options) {
  std::vector<HeightFunction> out(options.chains * options.samples);
  mcmc_run(g, v0, mode, options, [&](std::size_t chain, std::uint64_t index, const HeightFunction& f) {
    out[chain * options.samples + index] = f;
  });
  return out;
}

double split_rhat(const std::vector<std::vector<double>>& traces) {
  std::vector<std::vector<double>> halves;
  for (const auto& trace : traces) {
    const std::size_t half = trace.size() / 2;
    if (half < 2) continue;
    halves.emplace_back(trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(half));
    halves.emplace_back(trace.end() - static_cast<std::ptrdiff_t>(half), trace.end());
  }
  if (halves.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::size_t len = halves.front().size();
  for (const auto& h : halves) len = std::min(len, h.size());
  const double m = static_cast<double>(halves.size()), l = static_cast<double>(len);

  std::vector<double> means;
  double within = 0.0;
  for (const auto& h : halves) {
    const double mean = std::accumulate(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(len), 0.0) / l;
    double var = 0.0;
    for (std::size_t i = 0; i < len; ++i) var += (h[i] - mean) * (h[i] - mean);
    within += var / (l - 1.0);
    means.push_back(mean);
  }
  within /= m;
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double between = 0.0;
  for (double mean : means) between += (mean - grand) * (mean - grand);
  between *= l / (m - 1.0);
  if (within == 0.0) return between == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double pooled = (l - 1.0) / l * within + between / l;
  return std::sqrt(pooled / within);
}

}  // namespace lipflat
