#include "lipflat/height_function.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "lipflat/expansion.hpp"

namespace lipflat {

namespace {

constexpr double kSlack = 1e-9;

bool within(double count, double bound) { return count <= bound + kSlack * std::max(1.0, bound); }

}  // namespace

FunctionMode FunctionMode::lipschitz(int slope) {
  if (slope < 1) throw Error(Errc::invalid_argument, "slope M must be positive");
  return {FunctionKind::lipschitz, slope};
}

std::string FunctionMode::name() const { return is_hom() ? "hom" : "lipschitz(M=" + std::to_string(slope) + ")"; }

bool HeightFunction::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](Height x) { return x == 0; });
}

HeightFunction HeightFunction::negated() const {
  HeightFunction out = *this;
  for (Height& x : out.values) x = -x;
  return out;
}

Height HeightFunction::max() const { return values.empty() ? 0 : *std::max_element(values.begin(), values.end()); }
Height HeightFunction::min() const { return values.empty() ? 0 : *std::min_element(values.begin(), values.end()); }

std::size_t ValuesHash::operator()(const std::vector<Height>& values) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Height x : values) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 32));
}

std::string Violation::describe() const {
  switch (kind) {
    case Kind::length: return "length mismatch";
    case Kind::root: return "root " + std::to_string(u) + " not pinned to 0";
    case Kind::edge: return "edge {" + std::to_string(u) + "," + std::to_string(v) + "}";
    case Kind::parity: return "parity at vertex " + std::to_string(u);
  }
  return "unknown";
}

std::vector<Violation> validate(const Graph& g, const HeightFunction& f) {
  std::vector<Violation> out;
  if (f.values.size() != g.num_vertices()) {
    out.push_back({Violation::Kind::length});
    return out;
  }
  if (f.root >= g.num_vertices() || f[f.root] != 0) out.push_back({Violation::Kind::root, f.root});
  const bool hom = f.mode.is_hom();
  for (auto [u, v] : g.edges()) {
    const int diff = std::abs(f[u] - f[v]);
    if (hom ? diff != 1 : diff > f.mode.slope) out.push_back({Violation::Kind::edge, u, v});
  }
  if (hom && g.bipartition() && f.root < g.num_vertices()) {
    const int root_side = g.side(f.root);
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      const bool even = f[v] % 2 == 0;
      if (even != (g.side(v) == root_side)) out.push_back({Violation::Kind::parity, v});
    }
  }
  return out;
}

Phase Phase::negated() const {
  Phase out = *this;
  out.low = -high;
  out.high = -low;
  return out;
}

std::size_t count_outside(const HeightFunction& f, Height low, Height high) {
  return static_cast<std::size_t>(
      std::count_if(f.values.begin(), f.values.end(), [&](Height x) { return x < low || x > high; }));
}

Phase phase_lipschitz(const Graph& g, const HeightFunction& f, double lambda) {
  if (f.mode.is_hom()) throw Error(Errc::invalid_argument, "phase_lipschitz needs a Lipschitz function");
  if (!g.degree()) throw Error(Errc::not_regular, "phase needs a regular graph");
  Phase phase;
  if (f.is_zero()) return phase;

  const int slope = f.mode.slope;
  const double bound = 2.0 * lambda * static_cast<double>(g.num_vertices()) / static_cast<double>(*g.degree());
  const auto first_nonzero = std::find_if(f.values.begin(), f.values.end(), [](Height x) { return x != 0; });
  const bool f_is_larger = *first_nonzero > 0;

  std::vector<Height> sorted = f.values;
  if (!f_is_larger)
    for (Height& x : sorted) x = -x;
  std::sort(sorted.begin(), sorted.end());
  for (Height k = sorted.front() - slope; k <= sorted.back(); ++k) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), k) - sorted.begin();
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), k + slope);
    if (within(static_cast<double>(below + above), bound)) {
      phase.low = k;
      phase.high = k + slope;
      return f_is_larger ? phase : phase.negated();
    }
  }
  throw Error(Errc::invalid_lambda, "no interval meets the count bound " + std::to_string(bound));
}

Phase phase_hom(const Graph& g, const HeightFunction& f, double lambda) {
  if (!f.mode.is_hom()) throw Error(Errc::invalid_argument, "phase_hom needs a homomorphism");
  if (!g.degree()) throw Error(Errc::not_regular, "phase needs a regular graph");
  const std::size_t n = mixing_normalizer(g, ExpansionMode::bipartite);
  const double d = static_cast<double>(*g.degree());
  const double bound = 2.0 * lambda * static_cast<double>(n) / d;

  // of f and -f, the larger takes the smallest level and the other its negation
  const auto first_nonzero = std::find_if(f.values.begin(), f.values.end(), [](Height x) { return x != 0; });
  const bool f_is_larger = first_nonzero == f.values.end() || *first_nonzero > 0;

  for (int side = 0; side < 2; ++side) {
    std::vector<Height> values;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
      if (g.side(v) == side) values.push_back(f_is_larger ? f[v] : -f[v]);
    std::sort(values.begin(), values.end());
    for (auto it = values.begin(); it != values.end();) {
      const auto run_end = std::upper_bound(it, values.end(), *it);
      const auto differing = values.size() - static_cast<std::size_t>(run_end - it);
      if (within(static_cast<double>(differing), bound)) {
        Phase phase;
        phase.kind = FunctionKind::homomorphism;
        phase.low = phase.high = f_is_larger ? *it : -*it;
        phase.class_index = side;
        if (lambda < d / 3.0) {
          const Height k = phase.low;
          phase.far_count = static_cast<std::size_t>(
              std::count_if(f.values.begin(), f.values.end(), [k](Height x) { return std::abs(x - k) >= 2; }));
          const double far_bound = 3.0 * lambda * static_cast<double>(n) / d;
          if (!within(static_cast<double>(*phase.far_count), far_bound))
            throw Error(Errc::invalid_lambda, "refined count " + std::to_string(*phase.far_count) + " exceeds " +
                                                  std::to_string(far_bound));
        }
        return phase;
      }
      it = run_end;
    }
  }
  throw Error(Errc::invalid_lambda, "no class/level meets the count bound " + std::to_string(bound));
}

Phase compute_phase(const Graph& g, const HeightFunction& f, double lambda) {
  return f.mode.is_hom() ? phase_hom(g, f, lambda) : phase_lipschitz(g, f, lambda);
}

Height deviation(Height value, const Phase& phase) {
  if (value < phase.low) return phase.low - value;
  if (value > phase.high) return value - phase.high;
  return 0;
}

HeightFunction read_function(std::istream& in, Vertex root, FunctionMode mode) {
  HeightFunction f;
  f.root = root;
  f.mode = mode;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long value = 0;
    if (!(fields >> value)) continue;
    f.values.push_back(static_cast<Height>(value));
    std::string rest;
    if (fields >> rest) throw Error(Errc::parse, "function file: one integer per line");
  }
  return f;
}

void write_function(std::ostream& out, const HeightFunction& f) {
  for (Height x : f.values) out << x << '\n';
}

}  // namespace lipflat
