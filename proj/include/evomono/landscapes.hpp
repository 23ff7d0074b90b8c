#pragma once

// Landscape families: static linear functions, per-generation redrawn linear
// functions, the adversarial/friendly dynamic binary value models and their
// switching combination, and the partially-ordered selection process.

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evomono/core.hpp"

namespace evomono {

enum class Landscape {
  OneMax,
  BinVal,
  Dbv,          // dynamic binary value: fresh uniform permutation each generation
  NoisyLinear,  // fresh iid uniform {1..n} weights each generation
  Adbv,         // adversarial DBV: any non-dominated offspring is acceptable
  Fdbv,         // friendly DBV: only dominating offspring are acceptable
  Sdbv,         // switching DBV: ADBV below the cutoff, FDBV at or above it
  Poea,         // partially-ordered EA selection process with pessimism q
  PoeaMinus,    // q = 1 and incomparable ones-ties resolved toward the parent
};

struct LandscapeKind {
  Landscape tag = Landscape::OneMax;
  // SDBV cutoff on the zero count; defaults to n/2 when unset.
  std::optional<double> cutoff;
  // POEA pessimism probability.
  double pessimism = 1.0;

  double resolved_cutoff(int n) const {
    return cutoff ? *cutoff : static_cast<double>(n) / 2.0;
  }

  bool is_poea() const {
    return tag == Landscape::Poea || tag == Landscape::PoeaMinus;
  }

  // Selector syntax: onemax | binval | dbv | noisy-linear | adbv | fdbv |
  // sdbv[:cutoff=<float>] | poea[:q=<float>] | poea-minus
  static LandscapeKind parse(std::string_view s);
  std::string selector() const;
};

inline double parse_float_param(std::string_view s, std::string_view what) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("bad " + std::string(what) + " value: " + std::string(s));
  return v;
}

inline LandscapeKind LandscapeKind::parse(std::string_view s) {
  LandscapeKind k;
  std::string_view head = s, param;
  if (auto colon = s.find(':'); colon != std::string_view::npos) {
    head = s.substr(0, colon);
    param = s.substr(colon + 1);
  }
  if (head == "onemax") k.tag = Landscape::OneMax;
  else if (head == "binval") k.tag = Landscape::BinVal;
  else if (head == "dbv") k.tag = Landscape::Dbv;
  else if (head == "noisy-linear") k.tag = Landscape::NoisyLinear;
  else if (head == "adbv") k.tag = Landscape::Adbv;
  else if (head == "fdbv") k.tag = Landscape::Fdbv;
  else if (head == "sdbv") k.tag = Landscape::Sdbv;
  else if (head == "poea") k.tag = Landscape::Poea;
  else if (head == "poea-minus") k.tag = Landscape::PoeaMinus;
  else throw std::invalid_argument("unknown landscape: " + std::string(s));

  if (!param.empty()) {
    if (k.tag == Landscape::Sdbv && param.substr(0, 7) == "cutoff=") {
      double c = parse_float_param(param.substr(7), "cutoff");
      if (c < 0) throw std::invalid_argument("cutoff must be >= 0");
      k.cutoff = c;
    } else if (k.tag == Landscape::Poea && param.substr(0, 2) == "q=") {
      double q = parse_float_param(param.substr(2), "q");
      if (q < 0 || q > 1) throw std::invalid_argument("q must be in [0,1]");
      k.pessimism = q;
    } else {
      throw std::invalid_argument("bad landscape parameter: " + std::string(s));
    }
  }
  return k;
}

inline std::string LandscapeKind::selector() const {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
  };
  switch (tag) {
    case Landscape::OneMax: return "onemax";
    case Landscape::BinVal: return "binval";
    case Landscape::Dbv: return "dbv";
    case Landscape::NoisyLinear: return "noisy-linear";
    case Landscape::Adbv: return "adbv";
    case Landscape::Fdbv: return "fdbv";
    case Landscape::Sdbv:
      return cutoff ? "sdbv:cutoff=" + num(*cutoff) : "sdbv";
    case Landscape::Poea:
      return pessimism == 1.0 ? "poea" : "poea:q=" + num(pessimism);
    case Landscape::PoeaMinus: return "poea-minus";
  }
  return "?";
}

// Comparable fitness value of one candidate under one generation's function.
// Either a scalar (counts, weighted sums, POEA composite rank) or the
// candidate's bits read in descending-weight order, compared
// lexicographically; the latter is order-isomorphic to the weighted sum
// sum_i 2^i x_{sigma(i)} without ever forming big integers.
class FitnessKey {
public:
  static FitnessKey scalar(std::uint64_t v) {
    FitnessKey k;
    k.scalar_ = v;
    k.lex_ = false;
    return k;
  }
  static FitnessKey lex(BitString b) {
    FitnessKey k;
    k.bits_ = std::move(b);
    k.lex_ = true;
    return k;
  }

  std::strong_ordering operator<=>(const FitnessKey& o) const {
    assert(lex_ == o.lex_);
    if (lex_) return bits_ <=> o.bits_;
    return scalar_ <=> o.scalar_;
  }
  bool operator==(const FitnessKey& o) const {
    return (*this <=> o) == std::strong_ordering::equal;
  }

private:
  std::uint64_t scalar_ = 0;
  BitString bits_;
  bool lex_ = false;
};

// One generation's frozen fitness function, built against a parent.  For the
// dynamic families all per-generation randomness (permutation, weights, the
// POEA pessimism coin) is drawn at construction, so every candidate of the
// generation is judged by the same function.
class GenerationEvaluator {
public:
  GenerationEvaluator(LandscapeKind kind, BitString parent, RandomSource& rng)
      : kind_(kind), n_(parent.size()), parent_(std::move(parent)) {
    switch (kind_.tag) {
      case Landscape::OneMax:
        break;
      case Landscape::BinVal:
        break;  // identity weight order
      case Landscape::Dbv: {
        order_.resize(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) order_[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
        for (int i = n_ - 1; i > 0; --i) {
          auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::uint64_t>(i)));
          std::swap(order_[static_cast<std::size_t>(i)], order_[j]);
        }
        break;
      }
      case Landscape::NoisyLinear: {
        weights_.resize(static_cast<std::size_t>(n_));
        for (auto& w : weights_)
          w = static_cast<std::uint32_t>(rng.uniform_int(1, static_cast<std::uint64_t>(n_)));
        break;
      }
      case Landscape::Adbv:
      case Landscape::Fdbv:
        build_dbv_order(kind_.tag == Landscape::Adbv);
        break;
      case Landscape::Sdbv:
        // Dispatch on the parent's zero count against the cutoff: strictly
        // below -> adversarial regime, at or above -> friendly regime.
        build_dbv_order(parent_.zeros() < kind_.resolved_cutoff(n_));
        break;
      case Landscape::Poea:
        pessimistic_ = rng.bernoulli(kind_.pessimism);
        break;
      case Landscape::PoeaMinus:
        pessimistic_ = true;
        break;
    }
    parent_key_ = key(parent_);
  }

  const BitString& parent() const { return parent_; }
  const FitnessKey& parent_key() const { return parent_key_; }
  bool pessimistic() const { return pessimistic_; }
  const std::vector<std::uint32_t>& weight_order() const { return order_; }
  const std::vector<std::uint32_t>& weights() const { return weights_; }

  FitnessKey key(const BitString& candidate) const {
    assert(candidate.size() == n_);
    switch (kind_.tag) {
      case Landscape::OneMax:
        return FitnessKey::scalar(static_cast<std::uint64_t>(candidate.ones()));
      case Landscape::BinVal:
        return FitnessKey::lex(candidate);
      case Landscape::NoisyLinear: {
        std::uint64_t s = 0;
        for (int i = 0; i < n_; ++i)
          if (candidate.get(i)) s += weights_[static_cast<std::size_t>(i)];
        return FitnessKey::scalar(s);
      }
      case Landscape::Dbv:
      case Landscape::Adbv:
      case Landscape::Fdbv:
      case Landscape::Sdbv: {
        BitString k(n_);
        for (int r = 0; r < n_; ++r)
          if (candidate.get(static_cast<int>(order_[static_cast<std::size_t>(r)]))) k.set(r, true);
        return FitnessKey::lex(std::move(k));
      }
      case Landscape::Poea:
      case Landscape::PoeaMinus: {
        // Composite rank: domination class relative to the parent first, then
        // the ones count in the coin-preferred direction.  Used only by the
        // opt-in population extension; (1+1) selection applies the process
        // rule directly.
        std::uint64_t cls = dominates(candidate, parent_)  ? 2
                            : dominates(parent_, candidate) ? 0
                                                            : 1;
        auto c1 = static_cast<std::uint64_t>(candidate.ones());
        std::uint64_t dir = pessimistic_ ? static_cast<std::uint64_t>(n_) - c1 : c1;
        return FitnessKey::scalar(cls * static_cast<std::uint64_t>(n_ + 1) + dir);
      }
    }
    throw std::logic_error("unreachable");
  }

  // Single-offspring selection: does the offspring replace the parent?
  bool selects_offspring(const BitString& offspring) const {
    if (kind_.is_poea()) {
      if (dominates(offspring, parent_)) return true;   // covers equality
      if (dominates(parent_, offspring)) return false;  // strictly dominated
      int co = offspring.ones(), cp = parent_.ones();
      if (kind_.tag == Landscape::PoeaMinus)
        return co < cp;  // ones-tie stays with the parent
      return pessimistic_ ? co <= cp : co >= cp;
    }
    return key(offspring) >= parent_key_;
  }

private:
  // Weight order for the adversarial/friendly models.  Descending-weight rank
  // list: adversarial puts the parent's zero positions on top, friendly the
  // one positions.  Among equal parent bits the lower index gets the lower
  // weight, i.e. appears later in the rank list.
  void build_dbv_order(bool adversarial) {
    order_.reserve(static_cast<std::size_t>(n_));
    bool first = !adversarial;  // bit value whose positions get the top weights
    for (int i = n_ - 1; i >= 0; --i)
      if (parent_.get(i) == first) order_.push_back(static_cast<std::uint32_t>(i));
    for (int i = n_ - 1; i >= 0; --i)
      if (parent_.get(i) != first) order_.push_back(static_cast<std::uint32_t>(i));
  }

  LandscapeKind kind_;
  int n_;
  BitString parent_;
  FitnessKey parent_key_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> weights_;
  bool pessimistic_ = false;
};

inline GenerationEvaluator make_evaluator(const LandscapeKind& kind,
                                          const BitString& parent,
                                          RandomSource& rng) {
  return GenerationEvaluator(kind, parent, rng);
}

// The POEA selection rule as a standalone operation: a dominating offspring
// always wins, a strictly dominated one always loses, and an incomparable
// pair goes to the point with fewer ones with probability q (more ones
// otherwise), ones-ties to the offspring.
inline BitString poea_select(const BitString& parent, const BitString& offspring,
                             double q, RandomSource& rng) {
  if (dominates(offspring, parent)) return offspring;
  if (dominates(parent, offspring)) return parent;
  bool pessimistic = rng.bernoulli(q);
  int co = offspring.ones(), cp = parent.ones();
  if (co == cp) return offspring;
  bool offspring_fewer = co < cp;
  return pessimistic == offspring_fewer ? offspring : parent;
}

}  // namespace evomono
