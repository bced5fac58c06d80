#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lipflat/graph.hpp"
#include "lipflat/height_function.hpp"
#include "lipflat/rng.hpp"

namespace lipflat {

// ---- exact enumeration ----

struct EnumerationResult {
  std::vector<HeightFunction> functions;  // sorted lexicographically by value vector
  std::uint64_t count = 0;
};

// Every member of Lip_{v0}(G;M) or Hom_{v0}(G). Depth-first assignment in BFS order from
// v0, each value confined to what the already-assigned neighbors allow. Throws
// cap_exceeded once more than `cap` members are found.
EnumerationResult enumerate(const Graph& g, Vertex v0, FunctionMode mode, std::uint64_t cap = 10'000'000);

// Streaming form: visits members in search order without storing them. Returns the count.
std::uint64_t enumerate_each(const Graph& g, Vertex v0, FunctionMode mode, std::uint64_t cap,
                             const std::function<void(const HeightFunction&)>& visit);

// ---- Glauber dynamics ----

struct ChainState {
  HeightFunction f;
  std::uint64_t step = 0;
  Rng rng;
};

struct AllowedRange {
  Height low = 0;
  Height high = -1;
  Height stride = 1;  // 2 for homomorphisms
  std::size_t size() const { return high < low ? 0 : static_cast<std::size_t>((high - low) / stride + 1); }
  Height at(std::size_t i) const { return low + static_cast<Height>(i) * stride; }
  bool contains(Height x) const { return x >= low && x <= high && (x - low) % stride == 0; }
};

// Values f(v) may take given the current values of its neighbors.
AllowedRange allowed_values(const Graph& g, const HeightFunction& f, Vertex v);

// The minimal-oscillation start: zero for Lipschitz, 0/1 by color class for hom.
HeightFunction initial_state(const Graph& g, Vertex v0, FunctionMode mode);

// One heat-bath update from a single 64-bit draw: the high half of the product picks the
// vertex, the low half picks the new value.
void glauber_step(const Graph& g, ChainState& state);

// Probability that one step moves f to h (both valid, same root).
double transition_probability(const Graph& g, const HeightFunction& f, const HeightFunction& h);

// True when the one-step transition graph over `states` (assumed closed under moves) is
// connected.
bool transition_graph_connected(const Graph& g, const std::vector<HeightFunction>& states);

struct McmcOptions {
  std::uint64_t burnin = 10'000;
  std::uint64_t thin = 10;
  std::uint64_t samples = 1000;  // per chain
  std::size_t chains = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// Chain c runs on stream (seed, c). Recorded states are delivered per chain in order;
// with threads > 1 the visitor may be called concurrently for different chains.
void mcmc_run(const Graph& g, Vertex v0, FunctionMode mode, const McmcOptions& options,
              const std::function<void(std::size_t chain, std::uint64_t index, const HeightFunction&)>& visit);

// Samples of all chains, chain-major.
std::vector<HeightFunction> mcmc_sample(const Graph& g, Vertex v0, FunctionMode mode, const McmcOptions& options);

// Split potential scale reduction of a scalar statistic: each chain trace is halved and
// the halves are compared. Returns 1 for constant traces; NaN with fewer than 4 draws.
double split_rhat(const std::vector<std::vector<double>>& traces);

}  // namespace lipflat
