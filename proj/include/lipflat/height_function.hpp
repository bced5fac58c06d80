#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lipflat/graph.hpp"

namespace lipflat {

using Height = int;

enum class FunctionKind { lipschitz, homomorphism };

struct FunctionMode {
  FunctionKind kind = FunctionKind::lipschitz;
  int slope = 1;  // M for Lipschitz; 1 for homomorphisms

  static FunctionMode lipschitz(int slope);
  static FunctionMode homomorphism() { return {FunctionKind::homomorphism, 1}; }
  bool is_hom() const { return kind == FunctionKind::homomorphism; }
  std::string name() const;
  friend bool operator==(const FunctionMode&, const FunctionMode&) = default;
};

struct HeightFunction {
  std::vector<Height> values;
  Vertex root = 0;
  FunctionMode mode;

  Height operator[](Vertex v) const { return values[v]; }
  std::size_t size() const { return values.size(); }
  bool is_zero() const;
  HeightFunction negated() const;
  Height max() const;
  Height min() const;

  friend bool operator==(const HeightFunction& a, const HeightFunction& b) { return a.values == b.values; }
  friend auto operator<=>(const HeightFunction& a, const HeightFunction& b) { return a.values <=> b.values; }
};

struct ValuesHash {
  std::size_t operator()(const std::vector<Height>& values) const noexcept;
};

struct Violation {
  enum class Kind { length, root, edge, parity };
  Kind kind;
  Vertex u = 0;
  Vertex v = 0;
  std::string describe() const;
};

// Empty iff f is a member of its family (pinned at its root).
std::vector<Violation> validate(const Graph& g, const HeightFunction& f);

// Lipschitz phase: the integer interval [low, high] (high = low + M, or {0} for the zero
// function). Homomorphism phase: low = high = k, with the class index i* and, when
// lambda < d/3, the number of vertices at distance >= 2 from k.
struct Phase {
  FunctionKind kind = FunctionKind::lipschitz;
  Height low = 0;
  Height high = 0;
  std::optional<int> class_index;
  std::optional<std::size_t> far_count;

  Phase negated() const;
  friend bool operator==(const Phase& a, const Phase& b) {
    return a.kind == b.kind && a.low == b.low && a.high == b.high && a.class_index == b.class_index;
  }
};

// Number of vertices whose value lies outside [low, high].
std::size_t count_outside(const HeightFunction& f, Height low, Height high);

// Of f and -f, the one that is larger in lexicographic order of values by vertex id
// receives the minimal interval base k with at most 2*lambda*n/d values outside
// {k..k+M}; the other receives the negated interval.
Phase phase_lipschitz(const Graph& g, const HeightFunction& f, double lambda);

// i* is the smallest class admitting a level k with at most 2*lambda*n/d values on V_i
// different from k; n is the class size. When several k qualify, the larger of f and -f
// (as for the Lipschitz phase) takes the smallest and the other its negation.
Phase phase_hom(const Graph& g, const HeightFunction& f, double lambda);

Phase compute_phase(const Graph& g, const HeightFunction& f, double lambda);

Height deviation(Height value, const Phase& phase);
inline Height deviation(const HeightFunction& f, Vertex v, const Phase& phase) { return deviation(f[v], phase); }

// ---- function files: one integer per vertex per line ----
HeightFunction read_function(std::istream& in, Vertex root, FunctionMode mode);
void write_function(std::ostream& out, const HeightFunction& f);

}  // namespace lipflat
