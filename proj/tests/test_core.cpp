#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "evomono/core.hpp"

using namespace evomono;

namespace {

BitString from_index(int n, std::uint32_t bits) {
  BitString x(n);
  for (int b = 0; b < n; ++b)
    if ((bits >> b) & 1u) x.set(b, true);
  return x;
}

}  // namespace

TEST_CASE("bitstring construction, parsing and counting") {
  BitString x(5);
  CHECK(x.str() == "00000");
  CHECK(x.zeros() == 5);
  x.set(1, true);
  x.flip(4);
  CHECK(x.str() == "01001");
  CHECK(x.ones() == 2);
  CHECK(BitString::parse("01001") == x);
  CHECK(BitString::all_ones(7).str() == "1111111");
  CHECK(BitString::all_ones(7).all_set());
  CHECK_FALSE(x.all_set());
  CHECK_THROWS_AS(BitString::parse("01x"), std::invalid_argument);

  // multi-word strings keep per-bit semantics
  BitString big(130);
  big.set(0, true);
  big.set(64, true);
  big.set(129, true);
  CHECK(big.ones() == 3);
  CHECK(big.get(64));
  CHECK_FALSE(big.get(63));
  CHECK(BitString::parse(big.str()) == big);
  CHECK(BitString::all_ones(130).zeros() == 0);
}

TEST_CASE("bitstring comparison is display-order lexicographic") {
  CHECK(BitString::parse("100") > BitString::parse("011"));
  CHECK(BitString::parse("011") < BitString::parse("100"));
  CHECK(BitString::parse("101") == BitString::parse("101"));
  // order agrees with numeric value of the string read MSB-first
  for (int n : {3, 7, 12}) {
    int limit = n == 12 ? 300 : (1 << n);  // spot check at the larger width
    int mismatches = 0;
    for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(limit); ++a) {
      for (std::uint32_t b = 0; b < (1u << n); ++b) {
        BitString xa = from_index(n, a), xb = from_index(n, b);
        std::uint32_t va = 0, vb = 0;
        for (int i = 0; i < n; ++i) {
          va = va * 2 + (xa.get(i) ? 1 : 0);
          vb = vb * 2 + (xb.get(i) ? 1 : 0);
        }
        if (((xa <=> xb) < 0) != (va < vb)) ++mismatches;
      }
    }
    CHECK(mismatches == 0);
  }
  // crosses the word boundary
  BitString lo(70), hi(70);
  hi.set(69, true);
  CHECK(lo < hi);
  lo.set(0, true);
  CHECK(lo > hi);
}

TEST_CASE("domination is the componentwise partial order") {
  CHECK(dominates(BitString::parse("110"), BitString::parse("100")));
  CHECK(dominates(BitString::parse("110"), BitString::parse("110")));
  CHECK_FALSE(dominates(BitString::parse("011"), BitString::parse("110")));
  CHECK_FALSE(dominates(BitString::parse("100"), BitString::parse("110")));

  // exhaustive n = 5: reflexive, antisymmetric, transitive, and consistent
  // with the componentwise definition
  const int n = 5;
  for (std::uint32_t a = 0; a < (1u << n); ++a) {
    BitString xa = from_index(n, a);
    CHECK(dominates(xa, xa));
    for (std::uint32_t b = 0; b < (1u << n); ++b) {
      BitString xb = from_index(n, b);
      bool expect = (b & ~a) == 0;  // every set bit of b also set in a
      CHECK(dominates(xa, xb) == expect);
      if (dominates(xa, xb) && dominates(xb, xa)) CHECK(xa == xb);
      if (dominates(xa, xb)) {
        CHECK(xa.ones() >= xb.ones());
        for (std::uint32_t c = 0; c < (1u << n); ++c)
          if (dominates(xb, from_index(n, c))) CHECK(dominates(xa, from_index(n, c)));
      }
    }
  }
}

TEST_CASE("random source determinism and child stream independence") {
  RandomSource a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomSource c1 = RandomSource::child(7, 0), c1again = RandomSource::child(7, 0);
  RandomSource c2 = RandomSource::child(7, 1);
  bool all_equal = true;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t v = c1.next_u64();
    CHECK(v == c1again.next_u64());
    if (v != c2.next_u64()) all_equal = false;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform_int is exact-range and plausibly uniform") {
  RandomSource rng(99);
  std::vector<int> counts(6, 0);
  const int draws = 600000;
  for (int i = 0; i < draws; ++i) {
    std::uint64_t v = rng.uniform_int(2, 7);
    REQUIRE(v >= 2);
    REQUIRE(v <= 7);
    ++counts[static_cast<std::size_t>(v - 2)];
  }
  // chi-squared against uniform, 5 dof; 27.9 is far beyond the 99.9% quantile
  double expected = draws / 6.0, chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 27.9);
}

TEST_CASE("mutate edge rates and flip distribution") {
  RandomSource rng(5);
  BitString x = BitString::parse("0110010");
  CHECK(mutate(x, 0.0, rng) == x);
  BitString flipped = mutate(x, 1.0, rng);
  for (int i = 0; i < x.size(); ++i) CHECK(flipped.get(i) != x.get(i));

  // Pr[exactly one flip] at n=9, p=1/9 is (8/9)^8 ~ 0.38974; 3 sigma band
  const int n = 9, draws = 1000000;
  BitString base(n);
  RandomSource rng2(17);
  int one_flip = 0;
  for (int i = 0; i < draws; ++i)
    if (mutate(base, 1.0 / n, rng2).ones() == 1) ++one_flip;
  double p1 = std::pow(8.0 / 9.0, 8);
  double sigma = std::sqrt(p1 * (1 - p1) / draws);
  CHECK(std::abs(one_flip / static_cast<double>(draws) - p1) < 3 * sigma);
}

TEST_CASE("mutate consumes a fixed number of draws") {
  // stream alignment: two sources stay in lockstep regardless of outcomes
  RandomSource a(31), b(31);
  BitString x = BitString::parse("10101");
  for (int i = 0; i < 50; ++i) {
    mutate(x, 0.9, a);
    mutate(x, 0.9, b);
  }
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("random_bitstring is uniform") {
  const int n = 9, draws = 1000000;
  RandomSource rng(2024);
  std::vector<int> by_ones(n + 1, 0);
  long long total_ones = 0;
  for (int i = 0; i < draws; ++i) {
    BitString x = random_bitstring(n, rng);
    ++by_ones[static_cast<std::size_t>(x.ones())];
    total_ones += x.ones();
  }
  double mean = total_ones / static_cast<double>(draws);
  double sigma_mean = std::sqrt(n / 4.0 / draws);
  CHECK(std::abs(mean - n / 2.0) < 3 * sigma_mean);
  // chi-squared against Binomial(9, 1/2), 9 dof; 99.9% quantile ~ 27.88
  double chi2 = 0;
  for (int k = 0; k <= n; ++k) {
    double binom = 1;
    for (int t = 0; t < k; ++t) binom = binom * (n - t) / (t + 1);
    double expected = draws * binom / 512.0;
    chi2 += (by_ones[static_cast<std::size_t>(k)] - expected) *
            (by_ones[static_cast<std::size_t>(k)] - expected) / expected;
  }
  CHECK(chi2 < 27.88);

  // tail bits of the last word stay clear: counting is consistent
  RandomSource rng2(3);
  for (int i = 0; i < 100; ++i) {
    BitString x = random_bitstring(70, rng2);
    CHECK(x.ones() + x.zeros() == 70);
    CHECK(BitString::parse(x.str()) == x);
  }
}
