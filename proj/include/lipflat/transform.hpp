#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipflat/graph.hpp"
#include "lipflat/height_function.hpp"
#include "lipflat/tree_dp.hpp"

namespace lipflat {

// The flattening data of a function f around a vertex v above level k.
struct TransformContext {
  FunctionMode mode;
  Vertex v = 0;
  Height k = 0;
  VertexSet a;  // component of v in G^{<=2} restricted to {f > k+M} (hom: {f > k+1})
  VertexSet x;  // outer boundary of a
  VertexSet y;  // second outer boundary
  std::vector<Vertex> x_members;
  Vertex anchor = 0;        // a vertex of a adjacent to x
  std::vector<Height> ell;  // per x_members entry (Lipschitz only)
  std::vector<Height> u;    // per x_members entry (Lipschitz only)
  BigInt s_size;            // prod (u+1), or 2^|X| for hom
  BigInt s_minus_size;      // prod u (Lipschitz only)

  Height threshold() const { return k + (mode.is_hom() ? 1 : mode.slope); }
};

// Throws precondition if f(v) is not above the threshold or the component is all of V.
// With `check`, the structural invariants are verified and a failure throws internal.
TransformContext build_context(const Graph& g, const HeightFunction& f, Vertex v, Height k, bool check = true);

// Names of violated context invariants (empty when the context is sound).
std::vector<std::string> context_violations(const Graph& g, const HeightFunction& f, const TransformContext& ctx);

inline constexpr std::uint64_t kDefaultImageGuard = std::uint64_t{1} << 20;

// h_s for one choice vector s (indexed like ctx.x_members), before the shift.
std::vector<Height> flattened(const HeightFunction& f, const TransformContext& ctx, const std::vector<Height>& s);

// Every P_{v0}(h_s), in odometer order over s. Throws size_guard above `guard` members.
std::vector<HeightFunction> image_members(const HeightFunction& f, const TransformContext& ctx,
                                          std::uint64_t guard = kDefaultImageGuard);

// image_members with every member validated and pairwise distinctness checked; a
// failure is an internal error.
std::vector<HeightFunction> apply_T(const Graph& g, const HeightFunction& f, const TransformContext& ctx,
                                    std::uint64_t guard = kDefaultImageGuard);

// Validates `draws` uniformly drawn members; returns the number that failed validation.
std::uint64_t spot_check_T(const Graph& g, const HeightFunction& f, const TransformContext& ctx, std::uint64_t draws,
                           std::uint64_t seed);

// u_x read back from an image member h (Lipschitz).
std::vector<Height> recover_u(const Graph& g, const HeightFunction& h, const TransformContext& ctx);

// The unique f with h in T(f), given k and f on A u X.
HeightFunction reconstruct(const HeightFunction& h, const HeightFunction& f, const TransformContext& ctx);

enum class LevelStrategy { phase, zero };

struct CountingOptions {
  LevelStrategy level = LevelStrategy::phase;
  std::optional<double> lambda;  // required for the phase strategy
  std::uint64_t cap = 2'000'000;
  std::uint64_t image_guard = kDefaultImageGuard;
  std::uint64_t spot_draws = 1000;
  std::uint64_t seed = 1;
};

struct CheckTally {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::uint64_t skipped = 0;
  std::string witness;
  bool passed() const { return failed == 0; }
};

struct CountingReport {
  FunctionMode mode;
  Vertex v0 = 0;
  Vertex v = 0;
  std::size_t t = 1;
  std::uint64_t family_size = 0;
  std::uint64_t omega_plus = 0;
  std::uint64_t omega_minus = 0;
  std::uint64_t components = 0;  // distinct A
  std::uint64_t groups = 0;      // distinct (A, S)
  std::vector<CheckTally> checks;
  // Whether f -> -f maps the upper event onto the lower one; holds whenever the phase is
  // antisymmetric, which the homomorphism phase only guarantees on good bi-expanders.
  bool negation_symmetric = true;

  bool all_passed() const;
  const CheckTally& get(const std::string& name) const;
};

// Enumerates the family, forms the upper event f(v) > k(f) + tM (hom: k(f) + t),
// partitions it by A (and S), and checks every counting claim about T exactly.
CountingReport verify_counting(const Graph& g, Vertex v0, Vertex v, std::size_t t, FunctionMode mode,
                               const CountingOptions& options);

}  // namespace lipflat
