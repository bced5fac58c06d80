#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <vector>

#include "lipflat/graph.hpp"
#include "lipflat/height_function.hpp"

namespace lipflat {

using BigInt = boost::multiprecision::cpp_int;

// Natural log of a non-negative big integer (-inf for zero), accurate to double precision.
double log_bigint(const BigInt& x);

// log(a / b) for positive big integers.
inline double log_ratio(const BigInt& a, const BigInt& b) { return log_bigint(a) - log_bigint(b); }

// Exact decimal rendering "p/q" of a ratio reduced to lowest terms.
std::string ratio_string(const BigInt& numerator, const BigInt& denominator);

struct TreeDPOptions {
  bool exact = true;       // arbitrary-precision tables
  bool log_mirror = false; // log-domain tables (always on when exact is off)
};

// Counts of grounded functions on the complete tree with root degree d, every other
// internal vertex having d-1 children, and all d(d-1)^{h-1} leaves pinned to zero.
// Counts depend only on the distance to the leaves, so one table per level suffices.
class TreeDP {
 public:
  TreeDP(std::size_t d, std::size_t h, FunctionMode mode, const TreeDPOptions& options = {});

  std::size_t arity() const noexcept { return d_; }
  std::size_t height() const noexcept { return h_; }
  const FunctionMode& mode() const noexcept { return mode_; }
  bool exact() const noexcept { return exact_; }
  bool has_log() const noexcept { return !log_below_.empty(); }

  // Values a vertex at distance `level` from the leaves can take: [-M*level, M*level].
  Height reach(std::size_t level) const { return static_cast<Height>(level) * mode_.slope; }

  // Grounded extensions of the subtree below a non-root vertex at `level` with value x.
  const BigInt& below(std::size_t level, Height x) const;
  double log_below(std::size_t level, Height x) const;

  // Grounded functions with f(root) = x, and their total.
  const BigInt& root_count(Height x) const;
  double log_root_count(Height x) const;
  const BigInt& total() const;
  double log_total() const;

  // Number of grounded functions with f(w) = x for a vertex w at `depth` from the root
  // (entry x + reach(h - depth)). The root marginal is depth 0.
  std::vector<BigInt> depth_counts(std::size_t depth) const;
  std::vector<double> log_depth_counts(std::size_t depth) const;

  // Exact count of functions with |f(w)| > threshold at the given depth.
  BigInt tail_count(std::size_t depth, Height threshold) const;
  double log_tail(std::size_t depth, Height threshold) const;  // log probability

  bool compatible(Height x, Height y) const {
    const Height diff = x > y ? x - y : y - x;
    return mode_.is_hom() ? diff == 1 : diff <= mode_.slope;
  }

 private:
  std::size_t d_, h_;
  FunctionMode mode_;
  bool exact_;
  // below_[j][x + reach(j)] for j = 0..h-1; root_ over [-reach(h), reach(h)].
  std::vector<std::vector<BigInt>> below_;
  std::vector<BigInt> root_;
  BigInt total_;
  // child_sum_[j][y + reach(j+1)] = sum over x compatible with y of below_[j][x]
  std::vector<std::vector<BigInt>> child_sum_;
  std::vector<std::vector<double>> log_below_, log_child_sum_;
  std::vector<double> log_root_;
  double log_total_ = 0.0;
};

// Exact uniform grounded function on gen_tree(d, h, false): root value drawn in
// proportion to the root counts, then each child given its parent in proportion to its
// subtree counts. Requires exact tables. The returned function is pinned at the first
// leaf.
HeightFunction tree_sample(const TreeDP& dp, std::uint64_t seed);

}  // namespace lipflat
