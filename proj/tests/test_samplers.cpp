#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "lipflat/samplers.hpp"
#include "oracles.hpp"

using namespace lipflat;

namespace {

std::vector<std::vector<int>> values_of(const EnumerationResult& r) {
  std::vector<std::vector<int>> out;
  for (const auto& f : r.functions) out.push_back(f.values);
  return out;
}

std::vector<std::vector<int>> sorted(std::vector<std::vector<int>> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("enumeration counts") {
  const auto k4 = enumerate(complete_graph(4), 0, FunctionMode::lipschitz(1));
  CHECK(k4.count == 15);
  CHECK(k4.functions.size() == 15);
  CHECK(values_of(k4) == sorted(oracle::brute_family(complete_graph(4), 0, 1, false)));

  const Graph c4 = cycle_graph(4, true);
  CHECK(enumerate(c4, 0, FunctionMode::homomorphism()).count == 6);

  const Graph t3 = gen_tree(3, 2, true);
  CHECK(enumerate(t3, *t3.glue_vertex(), FunctionMode::lipschitz(1)).count == 45);
  const Graph t4 = gen_tree(4, 2, true);
  CHECK(enumerate(t4, *t4.glue_vertex(), FunctionMode::lipschitz(1)).count == 115);
}

TEST_CASE("enumeration errors") {
  CHECK_THROWS_WITH_AS(enumerate(complete_graph(4), 0, FunctionMode::lipschitz(1), 10), doctest::Contains("more than"),
                       Error);
  try {
    enumerate(complete_graph(4), 0, FunctionMode::homomorphism());
    FAIL("expected not_bipartite");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_bipartite);
  }
  try {
    enumerate(build_graph(4, {{0, 1}, {2, 3}}), 0, FunctionMode::lipschitz(1));
    FAIL("expected not_connected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_connected);
  }
}

TEST_CASE("enumeration agrees with assignment search on random graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = gen_random_regular(6 + 2 * (seed % 2), 3, seed);
    const int slope = 1 + static_cast<int>(seed % 2);
    const Vertex root = static_cast<Vertex>(seed % g.num_vertices());
    const auto result = enumerate(g, root, FunctionMode::lipschitz(slope));
    CHECK(values_of(result) == sorted(oracle::brute_family(g, root, slope, false)));
    std::set<std::vector<int>> distinct;
    for (const auto& f : result.functions) {
      CHECK(validate(g, f).empty());
      distinct.insert(f.values);
    }
    CHECK(distinct.size() == result.count);
  }
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = gen_random_bipartite_regular(4, 2 + seed % 2, seed);
    const Vertex root = static_cast<Vertex>(seed % g.num_vertices());
    CHECK(values_of(enumerate(g, root, FunctionMode::homomorphism())) == sorted(oracle::brute_family(g, root, 1, true)));
  }
}

TEST_CASE("allowed sets") {
  const Graph c4 = cycle_graph(4, true);
  HeightFunction f{{0, 1, 0, 1}, 0, FunctionMode::homomorphism()};
  const auto hom_range = allowed_values(c4, f, 1);
  CHECK(hom_range.size() == 2);
  CHECK(hom_range.at(0) == -1);
  CHECK(hom_range.at(1) == 1);
  HeightFunction g{{0, 1, 2, 1}, 0, FunctionMode::homomorphism()};
  CHECK(allowed_values(c4, g, 1).size() == 1);
  CHECK(allowed_values(c4, g, 1).at(0) == 1);

  HeightFunction z{{0, 0, 0, 0}, 0, FunctionMode::lipschitz(1)};
  const auto lip_range = allowed_values(complete_graph(4), z, 3);
  CHECK(lip_range.low == -1);
  CHECK(lip_range.high == 1);
}

TEST_CASE("glauber steps stay valid and never move the root") {
  const Graph g = gen_random_regular(30, 4, 5);
  for (Vertex root : {Vertex{0}, Vertex{17}, Vertex{29}}) {
    ChainState state{initial_state(g, root, FunctionMode::lipschitz(2)), 0, Rng(9, root)};
    for (int i = 0; i < 5000; ++i) {
      glauber_step(g, state);
      REQUIRE(state.f[root] == 0);
    }
    CHECK(validate(g, state.f).empty());
    CHECK(state.step == 5000);
    CHECK(state.rng.position() == 5000);
  }
  const Graph q3 = hypercube(3);
  ChainState hom_state{initial_state(q3, 0, FunctionMode::homomorphism()), 0, Rng(1)};
  for (int i = 0; i < 2000; ++i) glauber_step(q3, hom_state);
  CHECK(validate(q3, hom_state.f).empty());
}

TEST_CASE("detailed balance and irreducibility") {
  struct Instance {
    Graph g;
    FunctionMode mode;
  };
  for (const Instance& inst : {Instance{cycle_graph(4, true), FunctionMode::homomorphism()},
                               Instance{complete_graph(4), FunctionMode::lipschitz(1)},
                               Instance{cycle_graph(5), FunctionMode::lipschitz(1)}}) {
    const auto family = enumerate(inst.g, 0, inst.mode).functions;
    for (const auto& f : family) {
      double row = 0.0;
      for (const auto& h : family) {
        const double forward = transition_probability(inst.g, f, h);
        CHECK(forward == doctest::Approx(transition_probability(inst.g, h, f)));
        row += forward;
      }
      CHECK(row == doctest::Approx(1.0));
    }
    CHECK(transition_graph_connected(inst.g, family));
  }
}

TEST_CASE("mcmc determinism and uniformity on C4") {
  const Graph c4 = cycle_graph(4);
  McmcOptions options;
  options.burnin = 10'000;
  options.thin = 10;
  options.samples = 100'000;
  options.seed = 3;
  const auto samples = mcmc_sample(c4, 0, FunctionMode::lipschitz(1), options);
  const auto family = enumerate(c4, 0, FunctionMode::lipschitz(1)).functions;
  std::map<std::vector<int>, double> freq;
  for (const auto& f : samples) freq[f.values] += 1.0 / static_cast<double>(samples.size());
  double tv = 0.0;
  for (const auto& f : family) tv += std::abs(freq[f.values] - 1.0 / static_cast<double>(family.size()));
  CHECK(freq.size() == family.size());
  CHECK(tv / 2.0 <= 0.02);

  options.samples = 200;
  CHECK(mcmc_sample(c4, 0, FunctionMode::lipschitz(1), options) == mcmc_sample(c4, 0, FunctionMode::lipschitz(1), options));
}

TEST_CASE("multi-chain output does not depend on thread count") {
  const Graph g = hypercube(4);
  McmcOptions options;
  options.burnin = 500;
  options.thin = 3;
  options.samples = 50;
  options.chains = 4;
  options.seed = 8;
  const auto serial = mcmc_sample(g, 0, FunctionMode::homomorphism(), options);
  options.threads = 3;
  CHECK(mcmc_sample(g, 0, FunctionMode::homomorphism(), options) == serial);
  // chains use distinct streams
  CHECK(serial[0].values != serial[50].values);
}

TEST_CASE("split rhat") {
  Rng rng(4);
  std::vector<std::vector<double>> mixed(4), stuck(4);
  for (std::size_t c = 0; c < 4; ++c)
    for (int i = 0; i < 1000; ++i) {
      mixed[c].push_back(rng.unit());
      stuck[c].push_back(rng.unit() + static_cast<double>(c));
    }
  CHECK(split_rhat(mixed) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(split_rhat(stuck) > 1.5);
  CHECK(split_rhat({{1.0, 1.0, 1.0, 1.0}}) == 1.0);
  CHECK(std::isnan(split_rhat({{1.0}})));
}
