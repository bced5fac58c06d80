#include "lipflat/tree_dp.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "lipflat/rng.hpp"

namespace lipflat {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

double log_pow(double log_base, std::size_t exponent) {
  if (exponent == 0) return 0.0;
  return log_base == kNegInf ? kNegInf : log_base * static_cast<double>(exponent);
}

std::size_t offset(Height x, Height reach) { return static_cast<std::size_t>(x + reach); }

BigInt uniform_below(const BigInt& bound, Rng& rng) {
  const std::size_t bits = boost::multiprecision::msb(bound) + 1;
  for (;;) {
    BigInt value = 0;
    std::size_t have = 0;
    while (have < bits) {
      value <<= 64;
      value |= rng.next();
      have += 64;
    }
    value >>= (have - bits);
    if (value < bound) return value;
  }
}

}  // namespace

double log_bigint(const BigInt& x) {
  if (x <= 0) return kNegInf;
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 1000) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

std::string ratio_string(const BigInt& numerator, const BigInt& denominator) {
  const BigInt g = boost::multiprecision::gcd(numerator, denominator);
  if (g == 0) return numerator.str() + "/" + denominator.str();
  return BigInt(numerator / g).str() + "/" + BigInt(denominator / g).str();
}

TreeDP::TreeDP(std::size_t d, std::size_t h, FunctionMode mode, const TreeDPOptions& options)
    : d_(d), h_(h), mode_(mode), exact_(options.exact) {
  if (d < 3 || h < 1) throw Error(Errc::invalid_argument, "tree DP needs d >= 3 and h >= 1");
  const bool logs = options.log_mirror || !options.exact;

  // child_sum over the parent's range from a child table at `level`.
  auto exact_child_sum = [&](const std::vector<BigInt>& child, std::size_t level) {
    const Height rc = reach(level), rp = reach(level + 1);
    std::vector<BigInt> sums(offset(rp, rp) + 1);
    for (Height y = -rp; y <= rp; ++y)
      for (Height x = -rc; x <= rc; ++x)
        if (compatible(x, y)) sums[offset(y, rp)] += child[offset(x, rc)];
    return sums;
  };
  auto log_child_sum = [&](const std::vector<double>& child, std::size_t level) {
    const Height rc = reach(level), rp = reach(level + 1);
    std::vector<double> sums(offset(rp, rp) + 1, kNegInf);
    for (Height y = -rp; y <= rp; ++y) {
      std::vector<double> terms;
      for (Height x = -rc; x <= rc; ++x)
        if (compatible(x, y)) terms.push_back(child[offset(x, rc)]);
      sums[offset(y, rp)] = log_sum(terms);
    }
    return sums;
  };

  if (exact_) {
    below_.push_back({BigInt(1)});
    for (std::size_t j = 0; j < h; ++j) {
      child_sum_.push_back(exact_child_sum(below_[j], j));
      const std::size_t exponent = j + 1 == h ? d : d - 1;
      std::vector<BigInt> next;
      next.reserve(child_sum_[j].size());
      for (const BigInt& s : child_sum_[j]) next.push_back(boost::multiprecision::pow(s, static_cast<unsigned>(exponent)));
      if (j + 1 == h)
        root_ = std::move(next);
      else
        below_.push_back(std::move(next));
    }
    for (const BigInt& c : root_) total_ += c;
  }
  if (logs) {
    log_below_.push_back({0.0});
    for (std::size_t j = 0; j < h; ++j) {
      log_child_sum_.push_back(log_child_sum(log_below_[j], j));
      const std::size_t exponent = j + 1 == h ? d : d - 1;
      std::vector<double> next;
      for (double s : log_child_sum_[j]) next.push_back(log_pow(s, exponent));
      if (j + 1 == h)
        log_root_ = std::move(next);
      else
        log_below_.push_back(std::move(next));
    }
    log_total_ = log_sum(log_root_);
  }
}

const BigInt& TreeDP::below(std::size_t level, Height x) const {
  if (!exact_) throw Error(Errc::precondition, "exact tables were not kept");
  return below_.at(level).at(offset(x, reach(level)));
}

double TreeDP::log_below(std::size_t level, Height x) const {
  if (!has_log()) return log_bigint(below(level, x));
  return log_below_.at(level).at(offset(x, reach(level)));
}

const BigInt& TreeDP::root_count(Height x) const {
  if (!exact_) throw Error(Errc::precondition, "exact tables were not kept");
  return root_.at(offset(x, reach(h_)));
}

double TreeDP::log_root_count(Height x) const {
  if (!has_log()) return log_bigint(root_count(x));
  return log_root_.at(offset(x, reach(h_)));
}

const BigInt& TreeDP::total() const {
  if (!exact_) throw Error(Errc::precondition, "exact tables were not kept");
  return total_;
}

double TreeDP::log_total() const { return has_log() ? log_total_ : log_bigint(total_); }

std::vector<BigInt> TreeDP::depth_counts(std::size_t depth) const {
  if (!exact_) throw Error(Errc::precondition, "exact tables were not kept");
  if (depth > h_) throw Error(Errc::invalid_argument, "depth exceeds tree height");
  if (depth == 0) return root_;
  // up[y]: ways to fill everything outside the subtree of a vertex at the current depth
  // given its value y.
  std::size_t level = h_ - 1;
  std::vector<BigInt> up(offset(reach(level), reach(level)) + 1);
  for (Height x = -reach(level); x <= reach(level); ++x)
    for (Height y = -reach(h_); y <= reach(h_); ++y)
      if (compatible(x, y))
        up[offset(x, reach(level))] +=
            boost::multiprecision::pow(child_sum_[level][offset(y, reach(h_))], static_cast<unsigned>(d_ - 1));
  for (std::size_t k = 2; k <= depth; ++k) {
    const std::size_t parent = level;
    --level;
    std::vector<BigInt> next(offset(reach(level), reach(level)) + 1);
    for (Height x = -reach(level); x <= reach(level); ++x)
      for (Height y = -reach(parent); y <= reach(parent); ++y)
        if (compatible(x, y))
          next[offset(x, reach(level))] +=
              up[offset(y, reach(parent))] *
              boost::multiprecision::pow(child_sum_[level][offset(y, reach(parent))], static_cast<unsigned>(d_ - 2));
    up = std::move(next);
  }
  for (Height x = -reach(level); x <= reach(level); ++x) up[offset(x, reach(level))] *= below_[level][offset(x, reach(level))];
  return up;
}

std::vector<double> TreeDP::log_depth_counts(std::size_t depth) const {
  if (!has_log()) {
    std::vector<double> out;
    for (const BigInt& c : depth_counts(depth)) out.push_back(log_bigint(c));
    return out;
  }
  if (depth > h_) throw Error(Errc::invalid_argument, "depth exceeds tree height");
  if (depth == 0) return log_root_;
  std::size_t level = h_ - 1;
  std::vector<double> up(offset(reach(level), reach(level)) + 1, kNegInf);
  for (Height x = -reach(level); x <= reach(level); ++x)
    for (Height y = -reach(h_); y <= reach(h_); ++y)
      if (compatible(x, y))
        up[offset(x, reach(level))] =
            log_add(up[offset(x, reach(level))], log_pow(log_child_sum_[level][offset(y, reach(h_))], d_ - 1));
  for (std::size_t k = 2; k <= depth; ++k) {
    const std::size_t parent = level;
    --level;
    std::vector<double> next(offset(reach(level), reach(level)) + 1, kNegInf);
    for (Height x = -reach(level); x <= reach(level); ++x)
      for (Height y = -reach(parent); y <= reach(parent); ++y)
        if (compatible(x, y)) {
          const double term = up[offset(y, reach(parent))] +
                              log_pow(log_child_sum_[level][offset(y, reach(parent))], d_ - 2);
          next[offset(x, reach(level))] = log_add(next[offset(x, reach(level))], term);
        }
    up = std::move(next);
  }
  for (Height x = -reach(level); x <= reach(level); ++x) {
    double& cell = up[offset(x, reach(level))];
    const double b = log_below_[level][offset(x, reach(level))];
    cell = (cell == kNegInf || b == kNegInf) ? kNegInf : cell + b;
  }
  return up;
}

BigInt TreeDP::tail_count(std::size_t depth, Height threshold) const {
  const auto counts = depth_counts(depth);
  const Height r = reach(h_ - depth);
  BigInt sum = 0;
  for (Height x = -r; x <= r; ++x)
    if (std::abs(x) > threshold) sum += counts[offset(x, r)];
  return sum;
}

double TreeDP::log_tail(std::size_t depth, Height threshold) const {
  if (exact_) return log_ratio(tail_count(depth, threshold), total_);
  const auto counts = log_depth_counts(depth);
  const Height r = reach(h_ - depth);
  std::vector<double> terms;
  for (Height x = -r; x <= r; ++x)
    if (std::abs(x) > threshold) terms.push_back(counts[offset(x, r)]);
  return log_sum(terms) - log_total_;
}

HeightFunction tree_sample(const TreeDP& dp, std::uint64_t seed) {
  const std::size_t d = dp.arity(), h = dp.height();
  std::vector<std::size_t> first{0}, count{1};
  for (std::size_t depth = 1; depth <= h; ++depth) {
    first.push_back(first.back() + count.back());
    count.push_back(count.back() * (depth == 1 ? d : d - 1));
  }
  HeightFunction f{std::vector<Height>(first[h] + count[h], 0), static_cast<Vertex>(first[h]), dp.mode()};
  Rng rng(seed);

  auto draw = [&](Height low, Height high, const BigInt& total, auto&& weight) {
    BigInt r = uniform_below(total, rng);
    for (Height x = low; x <= high; ++x) {
      const BigInt w = weight(x);
      if (r < w) return x;
      r -= w;
    }
    throw Error(Errc::internal, "weights do not sum to the total");
  };

  f.values[0] = draw(-dp.reach(h), dp.reach(h), dp.total(), [&](Height x) { return dp.root_count(x); });
  for (std::size_t depth = 1; depth < h; ++depth) {
    const std::size_t children = depth == 1 ? d : d - 1;
    const std::size_t level = h - depth;
    for (std::size_t i = 0; i < count[depth]; ++i) {
      const std::size_t v = first[depth] + i;
      const std::size_t parent = first[depth - 1] + i / children;
      const Height y = f.values[parent];
      BigInt total = 0;
      for (Height x = -dp.reach(level); x <= dp.reach(level); ++x)
        if (dp.compatible(x, y)) total += dp.below(level, x);
      f.values[v] = draw(-dp.reach(level), dp.reach(level), total,
                         [&](Height x) { return dp.compatible(x, y) ? dp.below(level, x) : BigInt(0); });
    }
  }
  return f;
}

}  // namespace lipflat
