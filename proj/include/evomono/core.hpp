#pragma once

// Core primitives: packed bit strings, domination order, reproducible
// randomness, and the standard-bit-mutation operator.

#include <bit>
#include <cassert>
#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evomono {

// Fixed-length bit string over {0,1}^n.  Bits are stored MSB-first inside
// 64-bit words (bit i lives at word i/64, bit position 63-(i%64), unused tail
// bits kept zero), so word-wise unsigned comparison coincides with
// lexicographic comparison of the displayed string.  Behaviour is
// indistinguishable from a plain sequence of bits.
class BitString {
public:
  BitString() = default;
  explicit BitString(int n) : n_(n), w_(words_for(n), 0) { assert(n >= 0); }

  static BitString all_ones(int n) {
    BitString x(n);
    for (auto& w : x.w_) w = ~std::uint64_t{0};
    x.mask_tail();
    return x;
  }

  static BitString parse(std::string_view s) {
    BitString x(static_cast<int>(s.size()));
    for (int i = 0; i < x.n_; ++i) {
      if (s[i] == '1')
        x.set(i, true);
      else if (s[i] != '0')
        throw std::invalid_argument("BitString::parse: invalid character");
    }
    return x;
  }

  int size() const { return n_; }

  bool get(int i) const {
    assert(0 <= i && i < n_);
    return (w_[i >> 6] >> (63 - (i & 63))) & 1u;
  }

  void set(int i, bool v) {
    assert(0 <= i && i < n_);
    std::uint64_t m = std::uint64_t{1} << (63 - (i & 63));
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }

  void flip(int i) {
    assert(0 <= i && i < n_);
    w_[i >> 6] ^= std::uint64_t{1} << (63 - (i & 63));
  }

  int ones() const {
    int c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
  }

  int zeros() const { return n_ - ones(); }

  bool all_set() const { return ones() == n_; }

  std::string str() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i)
      if (get(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  friend bool operator==(const BitString& a, const BitString& b) = default;

  // Lexicographic order of the displayed strings; lengths must match.
  std::strong_ordering operator<=>(const BitString& o) const {
    assert(n_ == o.n_);
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k] != o.w_[k]) return w_[k] <=> o.w_[k];
    return std::strong_ordering::equal;
  }

  // x dominates y iff x_i >= y_i for every position.
  friend bool dominates(const BitString& x, const BitString& y) {
    assert(x.n_ == y.n_);
    for (std::size_t k = 0; k < x.w_.size(); ++k)
      if (y.w_[k] & ~x.w_[k]) return false;
    return true;
  }

  const std::vector<std::uint64_t>& words() const { return w_; }

private:
  static std::size_t words_for(int n) {
    return static_cast<std::size_t>((n + 63) / 64);
  }
  void mask_tail() {
    int r = n_ & 63;
    if (r != 0 && !w_.empty()) w_.back() &= ~std::uint64_t{0} << (64 - r);
  }

  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Reproducible random source.  The engine is std::mt19937_64, whose output
// sequence is pinned bit-for-bit by the C++ standard; all derived draws below
// avoid std::*_distribution (whose streams are implementation-defined).
class RandomSource {
public:
  static constexpr const char* kGeneratorId = "std::mt19937_64";
  static constexpr const char* kChildSeedId =
      "splitmix64(master+(index+1)*0x9e3779b97f4a7c15)";

  explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

  // Independent child stream for task `index`, a pure function of
  // (master seed, index): the golden-ratio increment feeds the SplitMix64
  // finalizer, whose output seeds a fresh engine.
  static RandomSource child(std::uint64_t master, std::uint64_t index) {
    return RandomSource(splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15ull));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [lo, hi], unbiased via rejection sampling.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    assert(lo <= hi);
    std::uint64_t range = hi - lo + 1;  // 0 means the full 2^64 range
    if (range == 0) return eng_();
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range + 1) % range;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v > limit);
    return lo + v % range;
  }

private:
  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 eng_;
};

// Standard bit mutation: flip each position independently with rate p.
// Consumes exactly n Bernoulli draws regardless of outcome.
inline BitString mutate(const BitString& x, double p, RandomSource& rng) {
  BitString y = x;
  for (int i = 0; i < x.size(); ++i)
    if (rng.bernoulli(p)) y.flip(i);
  return y;
}

// Uniform random point of {0,1}^n, drawn word at a time.
inline BitString random_bitstring(int n, RandomSource& rng) {
  BitString x(n);
  for (int i = 0; i < n; i += 64) {
    std::uint64_t w = rng.next_u64();
    int bits = std::min(64, n - i);
    w &= ~std::uint64_t{0} << (64 - bits);
    for (int b = 0; b < bits; ++b)
      if ((w >> (63 - b)) & 1u) x.set(i + b, true);
  }
  return x;
}

}  // namespace evomono
