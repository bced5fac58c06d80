#include "lipflat/transform.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <map>
#include <sstream>
#include <unordered_map>

#include "lipflat/expansion.hpp"
#include "lipflat/rng.hpp"
#include "lipflat/samplers.hpp"

namespace lipflat {

namespace {

std::string show(const std::vector<Height>& values) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  out << ')';
  return out.str();
}

std::string show(const VertexSet& set) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  set.for_each([&](Vertex v) {
    out << (first ? "" : ",") << v;
    first = false;
  });
  out << '}';
  return out.str();
}

BigInt big_pow(std::uint64_t base, std::size_t exponent) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

}  // namespace

TransformContext build_context(const Graph& g, const HeightFunction& f, Vertex v, Height k, bool check) {
  TransformContext ctx;
  ctx.mode = f.mode;
  ctx.v = v;
  ctx.k = k;
  const Height threshold = ctx.threshold();
  if (f[v] <= threshold)
    throw Error(Errc::precondition, "f(v) = " + std::to_string(f[v]) + " is not above " + std::to_string(threshold));

  const std::size_t n = g.num_vertices();
  VertexSet above(n);
  for (Vertex w = 0; w < n; ++w)
    if (f[w] > threshold) above.insert(w);
  ctx.a = component_in_square(g, v, above);
  if (ctx.a.size() == n) throw Error(Errc::precondition, "no vertex at or below the threshold");
  const Boundary b = boundary(g, ctx.a);
  ctx.x = b.outer;
  ctx.y = b.outer2;
  ctx.x_members = ctx.x.members();
  if (ctx.x_members.empty()) throw Error(Errc::precondition, "the component has no boundary");
  for (Vertex w : g.neighbors(ctx.x_members.front()))
    if (ctx.a.contains(w)) {
      ctx.anchor = w;
      break;
    }

  if (f.mode.is_hom()) {
    ctx.s_size = big_pow(2, ctx.x_members.size());
    ctx.s_minus_size = 0;
  } else {
    const int slope = f.mode.slope;
    ctx.s_size = 1;
    ctx.s_minus_size = 1;
    for (Vertex x : ctx.x_members) {
      Height ell = std::numeric_limits<Height>::min();
      Height u = slope;
      for (Vertex w : g.neighbors(x)) {
        if (ctx.a.contains(w))
          ell = std::max(ell, f[w] - slope - k);
        else if (!ctx.x.contains(w))
          u = std::min(u, f[w] + slope - k);
      }
      ctx.ell.push_back(ell);
      ctx.u.push_back(u);
      ctx.s_size *= std::max<Height>(u + 1, 0);
      ctx.s_minus_size *= std::max<Height>(u, 0);
    }
  }
  if (check) {
    const auto broken = context_violations(g, f, ctx);
    if (!broken.empty()) throw Error(Errc::internal, "context invariant violated: " + broken.front());
  }
  return ctx;
}

std::vector<std::string> context_violations(const Graph& g, const HeightFunction& f, const TransformContext& ctx) {
  std::vector<std::string> out;
  if (!ctx.a.contains(ctx.v)) out.push_back("f_on_A:v_not_in_A");
  if (ctx.a.intersects(ctx.x)) out.push_back("f_on_A:A_meets_X");
  const Boundary b = boundary(g, ctx.a);
  if (b.outer != ctx.x || b.outer2 != ctx.y) out.push_back("f_on_A:boundary_mismatch");

  const Height k = ctx.k;
  const bool hom = f.mode.is_hom();
  const int slope = f.mode.slope;
  ctx.a.for_each([&](Vertex w) {
    if (f[w] <= ctx.threshold()) out.push_back("f_on_A:A_not_above at " + std::to_string(w));
  });
  ctx.x.for_each([&](Vertex w) {
    const bool ok = hom ? f[w] == k + 1 : (f[w] >= k + 1 && f[w] <= k + slope);
    if (!ok) out.push_back("f_on_A:X_values at " + std::to_string(w));
  });
  ctx.y.for_each([&](Vertex w) {
    const bool ok = hom ? f[w] == k : f[w] <= k + slope;
    if (!ok) out.push_back("f_on_A:Y_values at " + std::to_string(w));
  });
  if (!hom) {
    for (std::size_t i = 0; i < ctx.x_members.size(); ++i) {
      const Height fx = f[ctx.x_members[i]] - k;
      if (!(1 <= ctx.ell[i] && ctx.ell[i] <= fx && fx <= ctx.u[i] && ctx.u[i] <= slope))
        out.push_back("lu_chain at " + std::to_string(ctx.x_members[i]));
    }
  }
  return out;
}

std::vector<Height> flattened(const HeightFunction& f, const TransformContext& ctx, const std::vector<Height>& s) {
  std::vector<Height> h = f.values;
  const bool hom = f.mode.is_hom();
  ctx.a.for_each([&](Vertex w) { h[w] = hom ? f[w] - 2 : ctx.k + f.mode.slope; });
  for (std::size_t i = 0; i < ctx.x_members.size(); ++i) h[ctx.x_members[i]] = ctx.k + s[i];
  return h;
}

namespace {

HeightFunction shifted(std::vector<Height> h, const HeightFunction& f) {
  const Height base = h[f.root];
  for (Height& x : h) x -= base;
  return {std::move(h), f.root, f.mode};
}

}  // namespace

std::vector<HeightFunction> image_members(const HeightFunction& f, const TransformContext& ctx, std::uint64_t guard) {
  if (ctx.s_size > guard)
    throw Error(Errc::size_guard, "image of size " + ctx.s_size.str() + " exceeds the guard " + std::to_string(guard));
  const std::size_t m = ctx.x_members.size();
  const bool hom = f.mode.is_hom();
  std::vector<Height> low(m), high(m), step(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    low[i] = hom ? -1 : 0;
    high[i] = hom ? 1 : ctx.u[i];
    step[i] = hom ? 2 : 1;
  }
  std::vector<HeightFunction> out;
  out.reserve(ctx.s_size.convert_to<std::size_t>());
  std::vector<Height> s = low;
  for (;;) {
    out.push_back(shifted(flattened(f, ctx, s), f));
    std::size_t i = 0;
    while (i < m && s[i] == high[i]) {
      s[i] = low[i];
      ++i;
    }
    if (i == m) break;
    s[i] += step[i];
  }
  return out;
}

std::vector<HeightFunction> apply_T(const Graph& g, const HeightFunction& f, const TransformContext& ctx,
                                    std::uint64_t guard) {
  auto members = image_members(f, ctx, guard);
  for (const auto& h : members) {
    const auto broken = validate(g, h);
    if (!broken.empty()) throw Error(Errc::internal, "flattened function invalid: " + broken.front().describe());
  }
  auto sorted = members;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(Errc::internal, "shift is not one-to-one on the flattened family");
  return members;
}

std::uint64_t spot_check_T(const Graph& g, const HeightFunction& f, const TransformContext& ctx, std::uint64_t draws,
                           std::uint64_t seed) {
  Rng rng(seed);
  std::uint64_t failed = 0;
  std::vector<Height> s(ctx.x_members.size());
  for (std::uint64_t i = 0; i < draws; ++i) {
    for (std::size_t j = 0; j < s.size(); ++j)
      s[j] = f.mode.is_hom() ? (rng.below(2) == 0 ? -1 : 1)
                             : static_cast<Height>(rng.below(static_cast<std::uint64_t>(ctx.u[j]) + 1));
    if (!validate(g, shifted(flattened(f, ctx, s), f)).empty()) ++failed;
  }
  return failed;
}

std::vector<Height> recover_u(const Graph& g, const HeightFunction& h, const TransformContext& ctx) {
  const int slope = ctx.mode.slope;
  std::vector<Height> u;
  for (Vertex x : ctx.x_members) {
    Height best = slope;
    for (Vertex w : g.neighbors(x))
      if (!ctx.a.contains(w) && !ctx.x.contains(w)) best = std::min(best, h[w] - h[ctx.v] + 2 * slope);
    u.push_back(best);
  }
  return u;
}

HeightFunction reconstruct(const HeightFunction& h, const HeightFunction& f, const TransformContext& ctx) {
  HeightFunction out = h;
  if (ctx.mode.is_hom()) {
    // the anchor has f = k+2, hence h_s = k there
    const Vertex anchor = ctx.anchor;
    const Height shift = ctx.k - h[anchor];
    for (Vertex w = 0; w < h.size(); ++w) {
      if (ctx.a.contains(w))
        out.values[w] = h[w] + shift + 2;
      else if (ctx.x.contains(w))
        out.values[w] = ctx.k + 1;
      else
        out.values[w] = h[w] + shift;
    }
    return out;
  }
  const Height shift = ctx.k + ctx.mode.slope - h[ctx.v];
  for (Vertex w = 0; w < h.size(); ++w) {
    if (ctx.a.contains(w) || ctx.x.contains(w))
      out.values[w] = f[w];
    else
      out.values[w] = h[w] + shift;
  }
  return out;
}

bool CountingReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckTally& c) { return c.passed(); });
}

const CheckTally& CountingReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(Errc::invalid_argument, "no check named " + name);
}

namespace {

class Tallies {
 public:
  CheckTally& at(const std::string& name) {
    for (auto& c : list_)
      if (c.name == name) return c;
    list_.push_back({name, 0, 0, 0, {}});
    return list_.back();
  }
  template <typename Witness>
  void record(const std::string& name, bool ok, Witness&& witness) {
    CheckTally& c = at(name);
    ++c.checked;
    if (!ok && c.failed++ == 0) c.witness = witness();
  }
  void skip(const std::string& name, std::uint64_t count = 1) { at(name).skipped += count; }
  std::vector<CheckTally> take() { return std::move(list_); }

 private:
  std::vector<CheckTally> list_;
};

struct Group {
  VertexSet a;
  std::vector<Height> u;
  std::size_t x_size = 0;
  BigInt s_size, s_minus_size;
  std::uint64_t omega = 0;
  std::uint64_t min_image = std::numeric_limits<std::uint64_t>::max();
  bool complete = true;
  std::unordered_map<std::vector<Height>, std::uint64_t, ValuesHash> preimages;
};

}  // namespace

CountingReport verify_counting(const Graph& g, Vertex v0, Vertex v, std::size_t t, FunctionMode mode,
                               const CountingOptions& options) {
  if (t < 1) throw Error(Errc::invalid_argument, "t must be at least 1");
  if (v >= g.num_vertices() || v0 >= g.num_vertices()) throw Error(Errc::invalid_argument, "vertex out of range");
  if (options.level == LevelStrategy::phase && !options.lambda)
    throw Error(Errc::invalid_argument, "the phase level needs lambda");

  const bool hom = mode.is_hom();
  const int slope = mode.slope;
  const Height step = static_cast<Height>(t) * (hom ? 1 : slope);

  // (low, high) of the level interval; the upper event is f(v) > low + step.
  auto level_of = [&](const HeightFunction& f) -> std::pair<Height, Height> {
    if (options.level == LevelStrategy::zero) return {0, 0};
    const Phase p = compute_phase(g, f, *options.lambda);
    return {p.low, p.high};
  };

  CountingReport report;
  report.mode = mode;
  report.v0 = v0;
  report.v = v;
  report.t = t;

  const auto family = enumerate(g, v0, mode, options.cap).functions;
  report.family_size = family.size();
  const BigInt family_size = family.size();

  Tallies tallies;
  for (const char* name : {"grounding", "f_on_A", "lu_chain", "ball_in_A", "h_valid", "image_size", "u_recovery",
                           "reconstruction", "preimage_bound", "image_disjoint", "ratio_bound", "double_counting",
                           "probability_bound"})
    tallies.at(name);
  const bool tree = g.glue_vertex().has_value() && g.tree_arity().has_value();
  if (tree) tallies.at("tree_expansion");

  std::optional<double> size_bound;
  if (options.level == LevelStrategy::phase && g.degree()) {
    const double d = static_cast<double>(*g.degree());
    const double lambda = *options.lambda;
    if (!hom)
      size_bound = 2.0 * lambda * static_cast<double>(g.num_vertices()) / d;
    else if (lambda < d / 3.0 && g.bipartition())
      size_bound = 3.0 * lambda * static_cast<double>(g.bipartition()->side0.size()) / d;
    if (size_bound) tallies.at("A_size");
  }

  const VertexSet near = ball(g, v, t - 1);
  std::map<std::pair<VertexSet, std::vector<Height>>, Group> groups;
  std::uint64_t spot_seed = options.seed;

  for (const HeightFunction& f : family) {
    const auto [low, high] = level_of(f);
    const bool upper = f[v] > low + step;
    const bool lower = f[v] < high - step;
    report.omega_minus += lower ? 1 : 0;
    {
      const HeightFunction neg = f.negated();
      const auto [nlow, nhigh] = level_of(neg);
      if (upper != (neg[v] < nhigh - step)) report.negation_symmetric = false;
      (void)nlow;
    }
    if (!upper) continue;
    ++report.omega_plus;

    const Height k = low;
    TransformContext ctx;
    try {
      ctx = build_context(g, f, v, k, false);
    } catch (const Error& e) {
      if (e.code() != Errc::precondition) throw;
      tallies.record("grounding", false, [&] { return "f=" + show(f.values) + ": " + e.what(); });
      continue;
    }
    tallies.record("grounding", true, [] { return std::string(); });

    const auto broken = context_violations(g, f, ctx);
    auto first_with = [&](const std::string& prefix) -> std::optional<std::string> {
      for (const auto& b : broken)
        if (b.rfind(prefix, 0) == 0) return b;
      return std::nullopt;
    };
    const auto on_a = first_with("f_on_A");
    tallies.record("f_on_A", !on_a, [&] { return "f=" + show(f.values) + " " + *on_a; });
    if (!hom) {
      const auto chain = first_with("lu_chain");
      tallies.record("lu_chain", !chain, [&] { return "f=" + show(f.values) + " " + *chain; });
    }
    tallies.record("ball_in_A", near.is_subset_of(ctx.a),
                   [&] { return "f=" + show(f.values) + " A=" + show(ctx.a); });
    if (size_bound)
      tallies.record("A_size", static_cast<double>(ctx.a.size()) <= *size_bound + 1e-9,
                     [&] { return "f=" + show(f.values) + " |A|=" + std::to_string(ctx.a.size()); });
    if (tree) {
      const Vertex glue = *g.glue_vertex();
      const std::size_t d = *g.tree_arity();
      const bool ok = !ctx.a.contains(glue) && !ctx.x.contains(glue) && ctx.x.size() > (d - 2) * ctx.a.size();
      tallies.record("tree_expansion", ok, [&] {
        return "f=" + show(f.values) + " |A|=" + std::to_string(ctx.a.size()) + " |X|=" + std::to_string(ctx.x.size());
      });
    }

    Group& group = groups[{ctx.a, hom ? std::vector<Height>{} : ctx.u}];
    if (group.omega == 0) {
      group.a = ctx.a;
      group.u = hom ? std::vector<Height>{} : ctx.u;
      group.x_size = ctx.x_members.size();
      group.s_size = ctx.s_size;
      group.s_minus_size = ctx.s_minus_size;
    }
    ++group.omega;

    if (!broken.empty() || ctx.s_size > options.image_guard) {
      // either the context is unsound or the image is too large to list
      group.complete = false;
      if (broken.empty()) {
        const std::uint64_t failed = spot_check_T(g, f, ctx, options.spot_draws, spot_seed++);
        CheckTally& c = tallies.at("h_valid");
        c.checked += options.spot_draws;
        if (failed > 0 && c.failed == 0) c.witness = "f=" + show(f.values) + " (sampled)";
        c.failed += failed;
      }
      for (const char* name : {"image_size", "u_recovery", "reconstruction"}) tallies.skip(name);
      continue;
    }

    const auto members = image_members(f, ctx, options.image_guard);
    std::vector<std::vector<Height>> distinct;
    distinct.reserve(members.size());
    bool recovered = true, rebuilt = true;
    std::string bad_member;
    for (const HeightFunction& h : members) {
      const auto invalid = validate(g, h);
      tallies.record("h_valid", invalid.empty(),
                     [&] { return "f=" + show(f.values) + " h=" + show(h.values) + " " + invalid.front().describe(); });
      if (!hom && recover_u(g, h, ctx) != ctx.u) {
        recovered = false;
        bad_member = show(h.values);
      }
      if (reconstruct(h, f, ctx).values != f.values) {
        rebuilt = false;
        bad_member = show(h.values);
      }
      distinct.push_back(h.values);
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    tallies.record("image_size", BigInt(distinct.size()) == ctx.s_size, [&] {
      return "f=" + show(f.values) + " distinct=" + std::to_string(distinct.size()) + " |S|=" + ctx.s_size.str();
    });
    if (!hom) tallies.record("u_recovery", recovered, [&] { return "f=" + show(f.values) + " h=" + bad_member; });
    tallies.record("reconstruction", rebuilt, [&] { return "f=" + show(f.values) + " h=" + bad_member; });

    group.min_image = std::min<std::uint64_t>(group.min_image, distinct.size());
    for (auto& h : distinct) ++group.preimages[std::move(h)];
  }

  // Per component: union of the images over S, and the per-A probability bound.
  struct Component {
    std::uint64_t omega = 0;
    std::size_t x_size = 0, a_size = 0;
    bool complete = true;
    std::unordered_map<std::vector<Height>, const Group*, ValuesHash> owner;
    bool disjoint = true;
    std::string clash;
  };
  std::map<VertexSet, Component> components;

  const BigInt m = slope;
  for (const auto& [key, group] : groups) {
    const std::size_t a_size = group.a.size();
    const BigInt alpha = hom ? BigInt(2)
                             : m * (2 * a_size + 1) * big_pow(2 * static_cast<std::uint64_t>(slope) + 1, a_size) *
                                   group.s_minus_size;
    Component& comp = components[group.a];
    comp.omega += group.omega;
    comp.x_size = group.x_size;
    comp.a_size = a_size;
    if (!group.complete) {
      comp.complete = false;
      for (const char* name : {"preimage_bound", "ratio_bound", "double_counting"}) tallies.skip(name);
      continue;
    }
    std::uint64_t max_preimages = 0;
    for (const auto& [h, count] : group.preimages) {
      max_preimages = std::max(max_preimages, count);
      tallies.record("preimage_bound", BigInt(count) <= alpha, [&] {
        return "A=" + show(group.a) + " h=" + show(h) + " preimages=" + std::to_string(count) + " bound=" + alpha.str();
      });
      const auto [it, fresh] = comp.owner.emplace(h, &group);
      if (!fresh && it->second != &group && comp.disjoint) {
        comp.disjoint = false;
        comp.clash = "A=" + show(group.a) + " h=" + show(h);
      }
    }
    const BigInt omega = group.omega;
    const BigInt image = group.preimages.size();
    tallies.record("ratio_bound", omega * group.s_size <= alpha * image, [&] {
      return "A=" + show(group.a) + " |P|=" + omega.str() + " |Q|=" + image.str() + " |S|=" + group.s_size.str();
    });
    tallies.record("double_counting", omega * group.min_image <= BigInt(max_preimages) * image,
                   [&] { return "A=" + show(group.a) + " |P|=" + omega.str() + " |Q|=" + image.str(); });
  }

  for (const auto& [a, comp] : components) {
    tallies.record("image_disjoint", comp.disjoint, [&] { return comp.clash; });
    const BigInt omega = comp.omega;
    bool ok;
    if (hom) {
      ok = omega * big_pow(2, comp.x_size) <= 2 * family_size;
    } else {
      const std::uint64_t mm = static_cast<std::uint64_t>(slope);
      ok = omega * big_pow(mm + 1, comp.x_size) <=
           m * (2 * comp.a_size + 1) * big_pow(2 * mm + 1, comp.a_size) * big_pow(mm, comp.x_size) * family_size;
    }
    tallies.record("probability_bound", ok, [&] {
      return "A=" + show(a) + " |Omega_A|=" + omega.str() + " |X|=" + std::to_string(comp.x_size);
    });
  }

  report.components = components.size();
  report.groups = groups.size();
  report.checks = tallies.take();
  if (hom) {
    auto& checks = report.checks;
    checks.erase(std::remove_if(checks.begin(), checks.end(),
                                [](const CheckTally& c) { return c.name == "lu_chain" || c.name == "u_recovery"; }),
                 checks.end());
  }
  return report;
}

}  // namespace lipflat
