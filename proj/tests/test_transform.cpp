#include <doctest.h>

#include <algorithm>
#include <set>

#include "lipflat/expansion.hpp"
#include "lipflat/samplers.hpp"
#include "lipflat/transform.hpp"
#include "oracles.hpp"

using namespace lipflat;

namespace {

void require_all_passed(const CountingReport& r) {
  for (const auto& c : r.checks) {
    INFO(c.name, ": ", c.witness);
    CHECK(c.passed());
  }
}

}  // namespace

TEST_CASE("flattening the height-two ternary tree") {
  const Graph t = gen_tree(3, 2, true);
  const Vertex glue = *t.glue_vertex();
  const HeightFunction f{{2, 1, 1, 1, 0}, glue, FunctionMode::lipschitz(1)};
  REQUIRE(validate(t, f).empty());

  const TransformContext ctx = build_context(t, f, 0, 0);
  CHECK(ctx.a == VertexSet(5, {0}));
  CHECK(ctx.x == VertexSet(5, {1, 2, 3}));
  CHECK(ctx.y == VertexSet(5, {glue}));
  CHECK(ctx.ell == std::vector<Height>{1, 1, 1});
  CHECK(ctx.u == std::vector<Height>{1, 1, 1});
  CHECK(ctx.s_size == 8);
  CHECK(ctx.s_minus_size == 1);

  const auto image = apply_T(t, f, ctx);
  std::set<std::vector<Height>> got;
  for (const auto& h : image) got.insert(h.values);
  std::set<std::vector<Height>> expected;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      for (int c = 0; c <= 1; ++c) expected.insert({1, a, b, c, 0});
  CHECK(got == expected);
  for (const auto& h : image) {
    CHECK(recover_u(t, h, ctx) == ctx.u);
    CHECK(reconstruct(h, f, ctx) == f);
  }
  CHECK(spot_check_T(t, f, ctx, 200, 3) == 0);
}

TEST_CASE("context preconditions") {
  const Graph c6 = cycle_graph(6);
  const HeightFunction f{{0, 1, 2, 3, 2, 1}, 0, FunctionMode::lipschitz(1)};
  CHECK_THROWS_AS(build_context(c6, f, 1, 0), Error);
  try {
    build_context(c6, f, 3, -5);
    FAIL("expected precondition");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::precondition);
  }
  const TransformContext ctx = build_context(c6, f, 3, 0);
  CHECK(ctx.a == VertexSet(6, {2, 3, 4}));
  CHECK(ctx.x == VertexSet(6, {1, 5}));
  CHECK(context_violations(c6, f, ctx).empty());

  TransformContext tampered = ctx;
  tampered.k = 1;
  CHECK_FALSE(context_violations(c6, f, tampered).empty());

  CHECK_THROWS_AS(image_members(f, ctx, 2), Error);
}

TEST_CASE("homomorphism flattening on the 4-cycle") {
  const Graph c4 = cycle_graph(4, true);
  const HeightFunction f{{0, 1, 2, 1}, 0, FunctionMode::homomorphism()};
  const TransformContext ctx = build_context(c4, f, 2, -1);
  CHECK(ctx.a == VertexSet(4, {1, 2, 3}));
  CHECK(ctx.x == VertexSet(4, {0}));
  CHECK(ctx.s_size == 2);
  const auto image = apply_T(c4, f, ctx);
  REQUIRE(image.size() == 2);
  for (const auto& h : image) CHECK(reconstruct(h, f, ctx) == f);
}

TEST_CASE("counting claims on the glued trees") {
  for (const auto& [d, h, slope] : {std::tuple{3, 2, 1}, std::tuple{4, 2, 1}, std::tuple{3, 3, 1}, std::tuple{3, 2, 2}}) {
    const Graph t = gen_tree(d, h, true);
    const Vertex glue = *t.glue_vertex();
    const auto brute = oracle::brute_family(t, glue, slope, false);
    for (std::size_t level = 1; level <= static_cast<std::size_t>(h); ++level) {
      CountingOptions options;
      options.level = LevelStrategy::zero;
      const auto report = verify_counting(t, glue, 0, level, FunctionMode::lipschitz(slope), options);
      CAPTURE(d);
      CAPTURE(h);
      CAPTURE(level);
      CHECK(report.family_size == brute.size());
      const auto above = std::count_if(brute.begin(), brute.end(),
                                       [&](const auto& f) { return f[0] > static_cast<int>(level) * slope; });
      CHECK(report.omega_plus == static_cast<std::uint64_t>(above));
      CHECK(report.omega_minus == report.omega_plus);
      CHECK(report.negation_symmetric);
      CHECK(report.get("tree_expansion").checked == report.omega_plus);
      require_all_passed(report);
    }
  }
}

TEST_CASE("counting claims on K4") {
  const Graph k4 = complete_graph(4);
  const double lambda = exhaustive_lambda(k4, ExpansionMode::general);
  CountingOptions options;
  options.lambda = lambda;
  for (Vertex v = 0; v < 4; ++v) {
    const auto report = verify_counting(k4, 0, v, 1, FunctionMode::lipschitz(1), options);
    CHECK(report.family_size == 15);
    // v raised to 1 with at most one other vertex: phase {-1,0} leaves at most two outside
    CHECK(report.omega_plus == (v == 0 ? 0u : 3u));
    require_all_passed(report);
  }
  // the pinned root never rises above its phase
  CHECK(verify_counting(k4, 0, 0, 1, FunctionMode::lipschitz(1), options).get("grounding").checked == 0);
}

TEST_CASE("counting claims with the phase level") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Graph g = gen_random_regular(10, 3, seed);
    CountingOptions options;
    options.lambda = exhaustive_lambda(g, ExpansionMode::general);
    for (Vertex v : {Vertex{3}, Vertex{7}}) {
      const auto report = verify_counting(g, 0, v, 1, FunctionMode::lipschitz(1), options);
      CAPTURE(seed);
      CAPTURE(v);
      require_all_passed(report);
    }
  }
}

TEST_CASE("counting claims for homomorphisms") {
  struct Case {
    Graph g;
    Vertex v;
  };
  for (const Case& c : {Case{cycle_graph(4, true), 2}, Case{hypercube(3), 7}, Case{complete_bipartite(3), 4},
                        Case{cycle_graph(8, true), 4}}) {
    const double lambda = exhaustive_lambda(c.g, ExpansionMode::bipartite);
    for (LevelStrategy level : {LevelStrategy::zero, LevelStrategy::phase}) {
      CountingOptions options;
      options.level = level;
      options.lambda = lambda;
      for (std::size_t t = 1; t <= 2; ++t) {
        const auto report = verify_counting(c.g, 0, c.v, t, FunctionMode::homomorphism(), options);
        CAPTURE(c.g.num_vertices());
        CAPTURE(t);
        require_all_passed(report);
        CHECK_THROWS(report.get("lu_chain"));
      }
    }
  }
  // zero level on the 8-cycle: f(4) = 4 is the only way above 3
  CountingOptions zero;
  zero.level = LevelStrategy::zero;
  const auto report = verify_counting(cycle_graph(8, true), 0, 4, 3, FunctionMode::homomorphism(), zero);
  CHECK(report.omega_plus == 1);
  CHECK(report.components == 1);
}

TEST_CASE("property: zero-level counting claims on random graphs") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Graph g = gen_random_regular(8, seed % 2 == 0 ? 3 : 4, seed);
    const int slope = 1 + static_cast<int>(seed % 3 == 2);
    CountingOptions options;
    options.level = LevelStrategy::zero;
    const Vertex v = static_cast<Vertex>(1 + seed % 7);
    for (std::size_t t = 1; t <= 2; ++t) {
      const auto report = verify_counting(g, 0, v, t, FunctionMode::lipschitz(slope), options);
      CAPTURE(seed);
      CAPTURE(t);
      require_all_passed(report);
      CHECK(report.negation_symmetric);
    }
  }
}

TEST_CASE("large images fall back to sampling") {
  const Graph t = gen_tree(3, 2, true);
  CountingOptions options;
  options.level = LevelStrategy::zero;
  options.image_guard = 1;
  const auto report = verify_counting(t, *t.glue_vertex(), 0, 1, FunctionMode::lipschitz(1), options);
  CHECK(report.all_passed());
  CHECK(report.get("image_size").skipped == report.omega_plus);
  CHECK(report.get("ratio_bound").skipped == report.groups);
}
