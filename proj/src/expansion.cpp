#include "lipflat/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lipflat/rng.hpp"

namespace lipflat {

namespace {

constexpr double kSlack = 1e-9;

bool leq(double a, double b) { return a <= b + kSlack * std::max(1.0, std::abs(b)); }

std::size_t regular_degree(const Graph& g) {
  if (!g.degree()) throw Error(Errc::not_regular, "graph is not regular");
  return *g.degree();
}

std::string describe(const VertexSet& s) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  s.for_each([&](Vertex v) {
    out << (first ? "" : ",") << v;
    first = false;
  });
  out << '}';
  return out.str();
}

}  // namespace

std::uint64_t edge_count(const Graph& g, const VertexSet& s, const VertexSet& t) {
  std::uint64_t total = 0;
  s.for_each([&](Vertex a) {
    for (Vertex b : g.neighbors(a))
      if (t.contains(b)) ++total;
  });
  return total;
}

std::size_t mixing_normalizer(const Graph& g, ExpansionMode mode) {
  if (mode == ExpansionMode::general) return g.num_vertices();
  if (!g.bipartition()) throw Error(Errc::not_bipartite, "bipartite mode needs a bipartition");
  const auto& parts = *g.bipartition();
  if (parts.side0.size() != parts.side1.size()) throw Error(Errc::not_bipartite, "color classes differ in size");
  return parts.side0.size();
}

LambdaWitness exhaustive_lambda_witness(const Graph& g, ExpansionMode mode, std::size_t max_bits) {
  const std::size_t d = regular_degree(g);
  const std::size_t n = mixing_normalizer(g, mode);
  if (2 * n > max_bits) throw Error(Errc::size_guard, "exhaustive lambda needs 2n <= " + std::to_string(max_bits));
  const std::size_t total = g.num_vertices();

  std::vector<Vertex> s_side, t_side;
  if (mode == ExpansionMode::general) {
    s_side.resize(total);
    std::iota(s_side.begin(), s_side.end(), Vertex{0});
    t_side = s_side;
  } else {
    s_side = g.bipartition()->side0.members();
    t_side = g.bipartition()->side1.members();
  }
  const std::size_t tn = t_side.size();
  std::vector<std::size_t> t_index(total, tn);
  for (std::size_t j = 0; j < tn; ++j) t_index[t_side[j]] = j;

  const double density = static_cast<double>(d) / static_cast<double>(n);
  std::vector<std::size_t> hits(tn, 0);  // |N(t) n S|
  std::vector<std::size_t> hist(d + 1, 0);
  std::vector<double> top(tn + 1, 0.0), bottom(tn + 1, 0.0);

  double best = 0.0;
  std::uint64_t best_mask = 0;
  std::size_t best_k = 0;
  bool best_top = true;
  std::uint64_t mask = 0;
  std::size_t s_size = 0;
  const std::uint64_t limit = std::uint64_t{1} << s_side.size();
  for (std::uint64_t i = 1; i < limit; ++i) {
    const int bit = std::countr_zero(i);
    const Vertex flipped = s_side[static_cast<std::size_t>(bit)];
    const bool adding = ((mask >> bit) & 1U) == 0;
    mask ^= std::uint64_t{1} << bit;
    s_size = adding ? s_size + 1 : s_size - 1;
    for (Vertex w : g.neighbors(flipped)) {
      const std::size_t j = t_index[w];
      if (j == tn) continue;
      hits[j] = adding ? hits[j] + 1 : hits[j] - 1;
    }
    if (s_size == 0) continue;

    std::fill(hist.begin(), hist.end(), 0);
    for (std::size_t h : hits) ++hist[h];
    std::size_t k = 0;
    double acc = 0.0;
    for (std::size_t value = d + 1; value-- > 0;)
      for (std::size_t c = 0; c < hist[value]; ++c) top[++k] = (acc += static_cast<double>(value));
    k = 0;
    acc = 0.0;
    for (std::size_t value = 0; value <= d; ++value)
      for (std::size_t c = 0; c < hist[value]; ++c) bottom[++k] = (acc += static_cast<double>(value));

    for (std::size_t tk = 1; tk <= tn; ++tk) {
      const double expected = density * static_cast<double>(s_size) * static_cast<double>(tk);
      const double scale = std::sqrt(static_cast<double>(s_size) * static_cast<double>(tk));
      const double over = (top[tk] - expected) / scale;
      const double under = (expected - bottom[tk]) / scale;
      if (over > best) {
        best = over;
        best_mask = mask;
        best_k = tk;
        best_top = true;
      }
      if (under > best) {
        best = under;
        best_mask = mask;
        best_k = tk;
        best_top = false;
      }
    }
  }

  LambdaWitness witness{best, VertexSet(total), VertexSet(total)};
  if (best_k == 0) return witness;
  std::fill(hits.begin(), hits.end(), 0);
  for (std::size_t b = 0; b < s_side.size(); ++b) {
    if (((best_mask >> b) & 1U) == 0) continue;
    witness.s.insert(s_side[b]);
    for (Vertex w : g.neighbors(s_side[b]))
      if (t_index[w] != tn) ++hits[t_index[w]];
  }
  std::vector<std::size_t> order(tn);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return best_top ? hits[a] > hits[b] : hits[a] < hits[b];
  });
  for (std::size_t j = 0; j < best_k; ++j) witness.t.insert(t_side[order[j]]);
  return witness;
}

double exhaustive_lambda(const Graph& g, ExpansionMode mode, std::size_t max_bits) {
  return exhaustive_lambda_witness(g, mode, max_bits).lambda;
}

double spectral_lambda(const Graph& g, ExpansionMode mode, const SpectralOptions& options) {
  const double d = static_cast<double>(regular_degree(g));
  const std::size_t total = g.num_vertices();
  std::vector<std::uint8_t> on_start(total, 1), on_mid(total, 1);
  if (mode == ExpansionMode::bipartite) {
    mixing_normalizer(g, mode);
    for (Vertex v = 0; v < total; ++v) {
      on_start[v] = g.side(v) == 0;
      on_mid[v] = g.side(v) == 1;
    }
  }
  // Both the start vector and the intermediate product live orthogonal to the all-ones
  // vector of their support, the known top eigenvector of a regular graph.
  auto deflate = [&](std::vector<double>& x, const std::vector<std::uint8_t>& support) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Vertex v = 0; v < total; ++v)
      if (support[v]) {
        sum += x[v];
        ++count;
      }
    if (count == 0) return;
    const double mean = sum / static_cast<double>(count);
    for (Vertex v = 0; v < total; ++v) x[v] = support[v] ? x[v] - mean : 0.0;
  };
  auto multiply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (Vertex v = 0; v < total; ++v) {
      double acc = 0.0;
      for (Vertex w : g.neighbors(v)) acc += x[w];
      y[v] = acc;
    }
  };
  auto norm = [](const std::vector<double>& x) {
    double acc = 0.0;
    for (double value : x) acc += value * value;
    return std::sqrt(acc);
  };

  Rng rng(options.seed);
  std::vector<double> x(total), y(total), z(total);
  for (double& value : x) value = rng.unit() - 0.5;
  deflate(x, on_start);
  double length = norm(x);
  if (length == 0.0) return 0.0;
  for (double& value : x) value /= length;

  double rho = 0.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    multiply(x, y);
    deflate(y, on_mid);
    multiply(y, z);
    deflate(z, on_start);
    double dot = 0.0;
    for (Vertex v = 0; v < total; ++v) dot += x[v] * z[v];
    rho = std::max(dot, 0.0);
    const double z_norm = norm(z);
    // Rounding noise of the squared operator is O(eps * d^2); below it the deflated
    // spectrum is zero.
    if (z_norm <= 1e-13 * d * d) return 0.0;
    double residual = 0.0;
    for (Vertex v = 0; v < total; ++v) residual += (z[v] - rho * x[v]) * (z[v] - rho * x[v]);
    residual = std::sqrt(residual);
    if (residual <= options.tol * std::max(rho, 1.0)) return std::sqrt(rho);
    for (Vertex v = 0; v < total; ++v) x[v] = z[v] / z_norm;
  }
  throw Error(Errc::no_convergence, "power iteration did not reach tol " + std::to_string(options.tol));
}

double m_good_threshold(std::size_t d, int slope) {
  const double dd = static_cast<double>(d);
  const double m = static_cast<double>(slope);
  return dd / (32.0 * (m + 1.0) * std::log(9.0 * m * dd * dd));
}

double good_bi_threshold(std::size_t d) {
  const double log_d = std::log(static_cast<double>(d));
  if (log_d <= 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(d) / (300.0 * log_d);
}

std::map<std::string, bool> goodness(std::size_t d, double lambda, std::optional<int> slope) {
  std::map<std::string, bool> out;
  if (slope) {
    if (*slope < 1) throw Error(Errc::invalid_argument, "slope must be positive");
    out["M-good(M=" + std::to_string(*slope) + ")"] = lambda <= m_good_threshold(d, *slope);
  }
  out["good-bi"] = lambda <= good_bi_threshold(d);
  return out;
}

bool ExpansionPropsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

const InequalityCheck& ExpansionPropsReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(Errc::invalid_argument, "no check named " + name);
}

ExpansionPropsReport check_expansion_props(const Graph& g, double lambda, ExpansionMode mode,
                                           const ExpansionPropsOptions& options) {
  const std::size_t d = regular_degree(g);
  const std::size_t n = mixing_normalizer(g, mode);
  const std::size_t total = g.num_vertices();
  const double dn = static_cast<double>(n);
  const double small = lambda * dn / static_cast<double>(d);
  const double growth = lambda > 0.0 ? static_cast<double>(d * d) / (4.0 * lambda * lambda)
                                     : std::numeric_limits<double>::infinity();

  auto named = [](const char* name) {
    InequalityCheck check;
    check.name = name;
    return check;
  };
  InequalityCheck connectivity = named("connectivity"), expansion = named("expansion"),
                  large_boundary = named("large_boundary"), volume = named("volume_growth"),
                  diam = named("diameter");

  auto record = [](InequalityCheck& check, bool ok, const std::string& witness) {
    ++check.checked;
    if (!ok && check.failed++ == 0) check.witness = witness;
  };

  // Connectivity is stated for one-sided sets in bipartite mode; the rest for all sets.
  auto one_sided = [&](const VertexSet& a) {
    if (mode == ExpansionMode::general) return true;
    const auto& parts = *g.bipartition();
    return a.is_subset_of(parts.side0) || a.is_subset_of(parts.side1);
  };

  auto check_set = [&](const VertexSet& a) {
    const std::size_t size = a.size();
    if (size == 0) {
      record(expansion, true, {});
      return;
    }
    const Boundary b = boundary(g, a);
    const double n_a = static_cast<double>(b.neighborhood.size());
    const double rhs = std::min(dn / 2.0, growth * static_cast<double>(size));
    record(expansion, leq(rhs, n_a), "A=" + describe(a) + " |N(A)|=" + std::to_string(b.neighborhood.size()));
    if (static_cast<double>(size) <= dn / 4.0) {
      const double rhs_b = std::min(dn / 4.0, (growth - 1.0) * static_cast<double>(size));
      record(large_boundary, leq(rhs_b, static_cast<double>(b.outer.size())),
             "A=" + describe(a) + " |dA|=" + std::to_string(b.outer.size()));
    }
    // Largest B with no edge to A is the complement of N(A) (within the opposite class
    // in bipartite mode).
    if (one_sided(a) && static_cast<double>(size) > small + kSlack) {
      VertexSet far = VertexSet::full(total) - b.neighborhood;
      if (mode == ExpansionMode::bipartite) {
        const auto& parts = *g.bipartition();
        far &= a.is_subset_of(parts.side0) ? parts.side1 : parts.side0;
      }
      record(connectivity, leq(static_cast<double>(far.size()), small),
             "A=" + describe(a) + " B=" + describe(far));
    }
  };

  if (options.scope == CheckScope::exhaustive) {
    if (total > options.max_exhaustive_vertices || total > 63)
      throw Error(Errc::size_guard, "exhaustive property check on " + std::to_string(total) + " vertices");
    const std::uint64_t limit = std::uint64_t{1} << total;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      VertexSet a(total);
      for (Vertex v = 0; v < total; ++v)
        if ((mask >> v) & 1U) a.insert(v);
      check_set(a);
    }
  } else {
    Rng rng(options.seed);
    for (Vertex v = 0; v < total; ++v) check_set(VertexSet(total, {v}));
    for (std::size_t i = 0; i < options.samples; ++i) {
      VertexSet a(total);
      const std::size_t want = 1 + static_cast<std::size_t>(rng.below(std::max<std::size_t>(1, total / 2)));
      if (mode == ExpansionMode::bipartite && rng.below(2) == 0) {
        const auto side = (rng.below(2) == 0 ? g.bipartition()->side0 : g.bipartition()->side1).members();
        for (std::size_t j = 0; j < want && j < side.size(); ++j) a.insert(side[rng.below(side.size())]);
      } else {
        for (std::size_t j = 0; j < want; ++j) a.insert(static_cast<Vertex>(rng.below(total)));
      }
      check_set(a);
    }
  }

  const std::size_t graph_diameter = diameter(g);
  for (Vertex v = 0; v < total; ++v) {
    const std::size_t reach = graph_diameter == kUnreachable ? total : graph_diameter + 1;
    for (std::size_t t = 0; t <= reach; ++t) {
      const double size = static_cast<double>(ball(g, v, t).size());
      const double power = std::pow(static_cast<double>(d) / (2.0 * lambda), 2.0 * static_cast<double>(t));
      const double rhs = std::min(dn / 2.0, t == 0 ? 1.0 : power);
      record(volume, leq(rhs, size), "v=" + std::to_string(v) + " t=" + std::to_string(t));
    }
  }

  const double ratio = static_cast<double>(d) / (2.0 * lambda);
  const bool diam_applies = mode == ExpansionMode::general ? lambda < static_cast<double>(d) / 2.0
                                                           : lambda <= static_cast<double>(d) / 8.0;
  if (diam_applies) {
    double bound = std::log(dn) / std::log(ratio);
    if (mode == ExpansionMode::bipartite) bound += 1.0;
    const bool ok = graph_diameter != kUnreachable && leq(static_cast<double>(graph_diameter), bound);
    std::ostringstream w;
    w << "diam=" << (graph_diameter == kUnreachable ? -1.0 : static_cast<double>(graph_diameter)) << " bound=" << bound;
    record(diam, ok, w.str());
  } else {
    diam.skipped = true;
  }

  ExpansionPropsReport report;
  report.checks = {connectivity, expansion, large_boundary, volume, diam};
  return report;
}

ExpansionReport certify(const Graph& g, ExpansionMode mode, const std::vector<int>& slopes,
                        const SpectralOptions& options, std::size_t max_bits) {
  ExpansionReport report;
  report.mode = mode;
  report.d = regular_degree(g);
  report.n = mixing_normalizer(g, mode);
  report.lambda_spectral = spectral_lambda(g, mode, options);
  if (2 * report.n <= max_bits) report.lambda_exhaustive = exhaustive_lambda(g, mode, max_bits);
  const double lambda = report.lambda_exhaustive.value_or(report.lambda_spectral + options.tol);
  for (int slope : slopes) {
    for (auto& [name, value] : goodness(report.d, lambda, slope)) report.predicates[name] = value;
  }
  if (slopes.empty()) report.predicates = goodness(report.d, lambda, std::nullopt);
  return report;
}

}  // namespace lipflat
