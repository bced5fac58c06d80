#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipflat/graph.hpp"

namespace lipflat {

enum class ExpansionMode { general, bipartite };

// Number of ordered pairs (s, t) in S x T joined by an edge.
std::uint64_t edge_count(const Graph& g, const VertexSet& s, const VertexSet& t);

// The size normalizer of the mixing inequality: vertex count (general) or class size
// (bipartite). Throws if the bipartite classes are missing or unbalanced.
std::size_t mixing_normalizer(const Graph& g, ExpansionMode mode);

struct LambdaWitness {
  double lambda = 0.0;
  VertexSet s;
  VertexSet t;
};

// Exact supremum of |e(S,T) - (d/n)|S||T|| / sqrt(|S||T|) over admissible non-empty
// pairs. S runs over all subsets (Gray code, incremental neighbor counts); for each S
// the optimal T of every size is read off the sorted neighbor counts. Requires
// 2 * normalizer <= max_bits.
LambdaWitness exhaustive_lambda_witness(const Graph& g, ExpansionMode mode, std::size_t max_bits = 24);
double exhaustive_lambda(const Graph& g, ExpansionMode mode, std::size_t max_bits = 24);

struct SpectralOptions {
  double tol = 1e-9;
  std::size_t max_iterations = 100'000;
  std::uint64_t seed = 0x5eed;
};

// Largest |eigenvalue| of the adjacency matrix orthogonal to the all-ones vector
// (general), or the second singular value of the V0 x V1 biadjacency (bipartite).
double spectral_lambda(const Graph& g, ExpansionMode mode, const SpectralOptions& options = {});

double m_good_threshold(std::size_t d, int slope);
double good_bi_threshold(std::size_t d);

// Predicate name -> value. "M-good(M=<slope>)" when a slope is given; "good-bi" always.
std::map<std::string, bool> goodness(std::size_t d, double lambda, std::optional<int> slope);

enum class CheckScope { exhaustive, sampled };

struct InequalityCheck {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  bool skipped = false;  // hypotheses of the statement not met
  std::string witness;   // first failure
  bool passed() const { return failed == 0; }
};

struct ExpansionPropsReport {
  std::vector<InequalityCheck> checks;
  bool all_passed() const;
  const InequalityCheck& get(const std::string& name) const;
};

struct ExpansionPropsOptions {
  CheckScope scope = CheckScope::exhaustive;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  std::size_t max_exhaustive_vertices = 20;
};

// Evaluates the connectivity, vertex-expansion, large-boundary, volume-growth and
// diameter inequalities implied by `lambda` being a valid expansion parameter.
ExpansionPropsReport check_expansion_props(const Graph& g, double lambda, ExpansionMode mode,
                                           const ExpansionPropsOptions& options = {});

struct ExpansionReport {
  ExpansionMode mode = ExpansionMode::general;
  std::size_t d = 0;
  std::size_t n = 0;
  double lambda_spectral = 0.0;
  std::optional<double> lambda_exhaustive;
  std::map<std::string, bool> predicates;
};

// Spectral lambda plus tol is used for the predicates unless an exhaustive value exists.
ExpansionReport certify(const Graph& g, ExpansionMode mode, const std::vector<int>& slopes,
                        const SpectralOptions& options = {}, std::size_t max_bits = 24);

}  // namespace lipflat
