#pragma once

// Brute-force verification machinery: exact per-point drift of any acceptance
// rule by offspring enumeration, the flip-class certificate quantities, and
// the drift-minimality property test for the switching rule at desk scale.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evomono/core.hpp"

namespace evomono {

// Selection predicate over (reference x, candidate y).  Monotone consistency
// (accept every dominating y, reject every strictly dominated y) is required
// of every rule used with the certificates below.
struct AcceptanceRule {
  std::string name;
  std::function<bool(const BitString&, const BitString&)> accept;
};

inline AcceptanceRule adbv_rule() {
  return {"adbv", [](const BitString& x, const BitString& y) {
            return y == x || !dominates(x, y);  // anything not strictly dominated
          }};
}

inline AcceptanceRule fdbv_rule() {
  return {"fdbv", [](const BitString& x, const BitString& y) { return dominates(y, x); }};
}

inline AcceptanceRule sdbv_rule(double cutoff) {
  return {"sdbv", [cutoff](const BitString& x, const BitString& y) {
            if (x.zeros() < cutoff) return y == x || !dominates(x, y);
            return dominates(y, x);
          }};
}

inline AcceptanceRule onemax_rule() {
  return {"onemax", [](const BitString& x, const BitString& y) { return y.ones() >= x.ones(); }};
}

inline AcceptanceRule binval_rule() {
  return {"binval", [](const BitString& x, const BitString& y) { return y >= x; }};
}

inline AcceptanceRule linear_rule(std::string name, std::vector<std::uint64_t> weights) {
  auto value = [w = std::move(weights)](const BitString& z) {
    std::uint64_t v = 0;
    for (int i = 0; i < z.size(); ++i)
      if (z.get(i)) v += w[static_cast<std::size_t>(i)];
    return v;
  };
  return {std::move(name),
          [value](const BitString& x, const BitString& y) { return value(y) >= value(x); }};
}

// Positive integer weights uniform on {1, ..., 2^n}; linearity gives
// monotonicity for free.
inline AcceptanceRule random_linear_rule(int n, int index, RandomSource& rng) {
  std::vector<std::uint64_t> w(static_cast<std::size_t>(n));
  for (auto& v : w) v = rng.uniform_int(1, std::uint64_t{1} << n);
  return linear_rule("linear#" + std::to_string(index), std::move(w));
}

// All points reachable from x by exactly i green flips (zero -> one) and
// j red flips (one -> zero).
struct FlipClass {
  int i = 0, j = 0;
  std::vector<BitString> members;

  static FlipClass of(const BitString& x, int i, int j);
};

namespace detail {

// Visit all size-k subsets of `positions`, flipping them in x.
template <typename Fn>
void for_each_flip(const BitString& x, const std::vector<int>& positions, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  auto rec = [&](auto&& self, int depth, int from, BitString& cur) -> void {
    if (depth == k) {
      fn(cur);
      return;
    }
    for (int t = from; t <= static_cast<int>(positions.size()) - (k - depth); ++t) {
      cur.flip(positions[static_cast<std::size_t>(t)]);
      self(self, depth + 1, t + 1, cur);
      cur.flip(positions[static_cast<std::size_t>(t)]);
    }
  };
  BitString cur = x;
  rec(rec, 0, 0, cur);
}

inline std::vector<int> zero_positions(const BitString& x) {
  std::vector<int> v;
  for (int i = 0; i < x.size(); ++i)
    if (!x.get(i)) v.push_back(i);
  return v;
}

inline std::vector<int> one_positions(const BitString& x) {
  std::vector<int> v;
  for (int i = 0; i < x.size(); ++i)
    if (x.get(i)) v.push_back(i);
  return v;
}

template <typename Fn>
void for_each_class_member(const BitString& x, int i, int j, Fn&& fn) {
  auto zs = zero_positions(x), os = one_positions(x);
  if (i > static_cast<int>(zs.size()) || j > static_cast<int>(os.size())) return;
  for_each_flip(x, zs, i, [&](BitString& green) {
    for_each_flip(green, os, j, [&](BitString& full) { fn(full); });
  });
}

}  // namespace detail

inline FlipClass FlipClass::of(const BitString& x, int i, int j) {
  FlipClass c;
  c.i = i;
  c.j = j;
  detail::for_each_class_member(x, i, j, [&](const BitString& y) { c.members.push_back(y); });
  return c;
}

// Exact drift of the zero count at x under `rule`:
// sum over all offspring y of Pr[mutate(x) = y] * (Z(x) - Z(y)) * accept(x,y),
// by enumeration of all 2^n mutation masks in extended precision.
inline long double exact_point_drift(const BitString& x, const AcceptanceRule& rule, double p) {
  int n = x.size();
  if (n > 20) throw std::invalid_argument("exact_point_drift: n > 20");
  std::vector<long double> pf(static_cast<std::size_t>(n) + 1), qf(static_cast<std::size_t>(n) + 1);
  pf[0] = qf[0] = 1.0L;
  for (int e = 1; e <= n; ++e) {
    pf[static_cast<std::size_t>(e)] = pf[static_cast<std::size_t>(e - 1)] * static_cast<long double>(p);
    qf[static_cast<std::size_t>(e)] = qf[static_cast<std::size_t>(e - 1)] * (1.0L - static_cast<long double>(p));
  }
  int zx = x.zeros();
  long double drift = 0;
  BitString y = x;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    y = x;
    for (int b = 0; b < n; ++b)
      if ((mask >> b) & 1u) y.flip(b);
    int flips = std::popcount(mask);
    int gain = zx - y.zeros();
    if (gain != 0 && rule.accept(x, y))
      drift += pf[static_cast<std::size_t>(flips)] * qf[static_cast<std::size_t>(n - flips)] *
               static_cast<long double>(gain);
  }
  return drift;
}

// The bracketed certificate quantity:
// sum_{y in A_{i,j}} (1_f - 1_m) - sum_{y in A_{j,i}} (1_f - 1_m).
// Nonnegative for every monotone f when m is the switching rule.
inline long long lemma3_quantity(const BitString& x, const AcceptanceRule& rule_f,
                                 const AcceptanceRule& rule_m, int i, int j) {
  if (!(i > j && j > 0)) throw std::invalid_argument("lemma3_quantity: need i > j > 0");
  if (x.size() > 14) throw std::invalid_argument("lemma3_quantity: n > 14");
  long long acc = 0;
  detail::for_each_class_member(x, i, j, [&](const BitString& y) {
    acc += static_cast<long long>(rule_f.accept(x, y)) - static_cast<long long>(rule_m.accept(x, y));
  });
  detail::for_each_class_member(x, j, i, [&](const BitString& y) {
    acc -= static_cast<long long>(rule_f.accept(x, y)) - static_cast<long long>(rule_m.accept(x, y));
  });
  return acc;
}

struct DominationCounts {
  // For each a in A_{i,j}: how many b in A_{j,i} it dominates.
  std::vector<long long> per_a;
  // For each b in A_{j,i}: how many a in A_{i,j} dominate it.
  std::vector<long long> per_b;
};

inline DominationCounts lemma4_domination_count(const BitString& x, int i, int j) {
  if (!(i > j && j > 0)) throw std::invalid_argument("lemma4_domination_count: need i > j > 0");
  if (x.size() > 14) throw std::invalid_argument("lemma4_domination_count: n > 14");
  FlipClass up = FlipClass::of(x, i, j), down = FlipClass::of(x, j, i);
  DominationCounts c;
  c.per_a.assign(up.members.size(), 0);
  c.per_b.assign(down.members.size(), 0);
  for (std::size_t a = 0; a < up.members.size(); ++a)
    for (std::size_t b = 0; b < down.members.size(); ++b)
      if (dominates(up.members[a], down.members[b])) {
        ++c.per_a[a];
        ++c.per_b[b];
      }
  return c;
}

struct MinimalityViolation {
  std::string point;
  std::string rule;
  long double sdbv_drift = 0;
  long double rule_drift = 0;
};

struct MinimalityReport {
  int n = 0;
  double rate = 0;
  int points_checked = 0;
  int rules_checked = 0;
  std::vector<MinimalityViolation> violations;

  bool passed() const { return violations.empty(); }
};

// Exhaustive desk-scale check: the switching rule's drift is minimal against
// every rule in the list, at every point, up to `slack`.
inline MinimalityReport minimality_suite(int n, double p,
                                         const std::vector<AcceptanceRule>& comparison_rules,
                                         long double slack = 1e-12L) {
  if (n > 12) throw std::invalid_argument("minimality_suite: n > 12");
  MinimalityReport report;
  report.n = n;
  report.rate = p;
  report.rules_checked = static_cast<int>(comparison_rules.size());
  AcceptanceRule sdbv = sdbv_rule(static_cast<double>(n) / 2.0);
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
    BitString x(n);
    for (int b = 0; b < n; ++b)
      if ((bits >> b) & 1u) x.set(b, true);
    ++report.points_checked;
    long double base = exact_point_drift(x, sdbv, p);
    for (const auto& rule : comparison_rules) {
      long double other = exact_point_drift(x, rule, p);
      if (base > other + slack)
        report.violations.push_back({x.str(), rule.name, base, other});
    }
  }
  return report;
}

}  // namespace evomono
