#pragma once

// Exact absorbing Markov chain for the switching dynamic-binary-value process
// reduced to the zero-count state: transition probabilities, per-state drift
// (with independently derived closed forms), hitting times via fraction-exact
// elimination, and the uniform-start expected optimization time.  Everything
// in this module is computed over exact rationals; there is no floating-point
// fast path.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evomono {

// Arbitrary-precision fraction, kept in reduced form with positive
// denominator (gmp canonicalizes after every operation).
using Rational = mpq_class;
using Integer = mpz_class;

// mpq_class(num, den) does not canonicalize on its own; route two-argument
// construction through here.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// C(a, b), with C(a,b) = 0 for b < 0 or b > a.
inline Integer binomial(unsigned long a, long b) {
  if (b < 0 || static_cast<unsigned long>(b) > a) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), a, static_cast<unsigned long>(b));
  return r;
}

inline Rational rational_pow(const Rational& base, unsigned long e) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
  return r;  // num/den coprime => powers coprime, already canonical
}

// Round-half-even decimal rendering of an exact fraction.
inline std::string to_decimal_string(const Rational& v, int digits) {
  Rational a = abs(v);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Integer num = a.get_num() * scale, den = a.get_den();
  Integer q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  Integer twice = 2 * r - den;
  if (sgn(twice) > 0 || (sgn(twice) == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  std::string out = Integer(q / scale).get_str();
  if (digits > 0) {
    std::string frac = Integer(q % scale).get_str();
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    out += "." + frac;
  }
  if (sgn(v) < 0 && q != 0) out.insert(0, 1, '-');
  return out;
}

inline std::string to_fraction_string(const Rational& v) {
  return v.get_str();  // "num/den", or "num" when the denominator is 1
}

struct ChainSpec {
  int n = 9;
  Rational cutoff;  // regime boundary on the zero count
  Rational rate;    // per-bit mutation rate

  ChainSpec(int n_, Rational cutoff_, Rational rate_)
      : n(n_), cutoff(std::move(cutoff_)), rate(std::move(rate_)) {
    if (n < 1) throw std::invalid_argument("ChainSpec: n must be positive");
    if (cutoff < 0 || cutoff > n)
      throw std::invalid_argument("ChainSpec: cutoff outside [0, n]");
    if (rate < 0 || rate > 1)
      throw std::invalid_argument("ChainSpec: rate outside [0, 1]");
  }

  // Default chain: cutoff n/2, rate 1/n.
  explicit ChainSpec(int n_) : ChainSpec(n_, make_rational(n_, 2), default_rate(n_)) {}

  bool friendly_regime(int s) const { return Rational(s) >= cutoff; }

 private:
  // guard n before forming 1/n, so ChainSpec(0) throws instead of dividing
  static Rational default_rate(int n_) {
    if (n_ < 1) throw std::invalid_argument("ChainSpec: n must be positive");
    return make_rational(1, n_);
  }
};

// One transition row p_{s,.}, including the diagonal.  States count zeros;
// state 0 is absorbing.  In the friendly regime (s at or above the cutoff)
// only pure improving moves are accepted: exactly s-k green flips and no red
// flip.  In the adversarial regime any offspring with at least one green flip
// survives, so the move to k sums over i >= 1 green flips combined with
// i-s+k red flips.
inline std::vector<Rational> transition_row(const ChainSpec& spec, int s) {
  int n = spec.n;
  std::vector<Rational> row(static_cast<std::size_t>(n) + 1, Rational(0));
  if (s == 0) {
    row[0] = 1;
    return row;
  }
  const Rational& p = spec.rate;
  Rational q = 1 - p;
  std::vector<Rational> pp(static_cast<std::size_t>(n) + 1), qp(static_cast<std::size_t>(n) + 1);
  for (int e = 0; e <= n; ++e) {
    pp[static_cast<std::size_t>(e)] = rational_pow(p, static_cast<unsigned long>(e));
    qp[static_cast<std::size_t>(e)] = rational_pow(q, static_cast<unsigned long>(e));
  }
  Rational off_sum(0);
  if (spec.friendly_regime(s)) {
    for (int k = 0; k < s; ++k) {
      row[static_cast<std::size_t>(k)] =
          Rational(binomial(static_cast<unsigned long>(s), s - k)) *
          pp[static_cast<std::size_t>(s - k)] * qp[static_cast<std::size_t>(n - s + k)];
      off_sum += row[static_cast<std::size_t>(k)];
    }
  } else {
    for (int k = 0; k <= n; ++k) {
      if (k == s) continue;
      Rational acc(0);
      for (int i = 1; i <= s; ++i) {
        int r = i - s + k;  // red flips forced by the state change
        if (r < 0 || r > n - s) continue;
        acc += Rational(binomial(static_cast<unsigned long>(s), i) *
                        binomial(static_cast<unsigned long>(n - s), r)) *
               pp[static_cast<std::size_t>(i + r)] * qp[static_cast<std::size_t>(n - i - r)];
      }
      row[static_cast<std::size_t>(k)] = acc;
      off_sum += acc;
    }
  }
  row[static_cast<std::size_t>(s)] = 1 - off_sum;
  return row;
}

inline Rational transition_probability(const ChainSpec& spec, int s, int k) {
  if (s < 0 || s > spec.n || k < 0 || k > spec.n)
    throw std::invalid_argument("transition_probability: state outside [0, n]");
  return transition_row(spec, s)[static_cast<std::size_t>(k)];
}

struct TransitionMatrix {
  int n = 0;
  std::vector<std::vector<Rational>> rows;  // (n+1) x (n+1)

  const Rational& at(int s, int k) const {
    return rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
  }
  Rational row_sum(int s) const {
    Rational acc(0);
    for (const auto& v : rows[static_cast<std::size_t>(s)]) acc += v;
    return acc;
  }
};

inline TransitionMatrix build_transition_matrix(const ChainSpec& spec) {
  TransitionMatrix m;
  m.n = spec.n;
  m.rows.reserve(static_cast<std::size_t>(spec.n) + 1);
  for (int s = 0; s <= spec.n; ++s) m.rows.push_back(transition_row(spec, s));
  return m;
}

// Expected one-step decrease of the zero count from state s.
inline Rational state_drift(const ChainSpec& spec, int s) {
  auto row = transition_row(spec, s);
  Rational acc(0);
  for (int k = 0; k <= spec.n; ++k)
    if (k != s) acc += Rational(s - k) * row[static_cast<std::size_t>(k)];
  return acc;
}

// Closed forms for the same drift, derived independently of the transition
// sums: friendly regime s*p*(1-p)^(n-s); adversarial regime
// s*p - (n-s)*p*(1-(1-p)^s).
inline Rational closed_form_drift(const ChainSpec& spec, int s) {
  if (s < 0 || s > spec.n)
    throw std::invalid_argument("closed_form_drift: state outside [0, n]");
  const Rational& p = spec.rate;
  Rational q = 1 - p;
  if (spec.friendly_regime(s))
    return Rational(s) * p * rational_pow(q, static_cast<unsigned long>(spec.n - s));
  return Rational(s) * p -
         Rational(spec.n - s) * p * (1 - rational_pow(q, static_cast<unsigned long>(s)));
}

// Fraction-exact Gaussian elimination with partial pivoting by numerator
// magnitude.  Solves A x = b in place; throws on a singular system.
inline std::vector<Rational> solve_linear_system(std::vector<std::vector<Rational>> a,
                                                 std::vector<Rational> b) {
  std::size_t m = a.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    Integer best = abs(a[col][col].get_num());
    for (std::size_t r = col + 1; r < m; ++r) {
      Integer cand = abs(a[r][col].get_num());
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (a[pivot][col] == 0) throw std::runtime_error("singular linear system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < m; ++r) {
      if (a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      a[r][col] = 0;
      for (std::size_t c = col + 1; c < m; ++c)
        if (a[col][c] != 0) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(m, Rational(0));
  for (std::size_t r = m; r-- > 0;) {
    Rational acc = b[r];
    for (std::size_t c = r + 1; c < m; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

// Expected generations to absorption from every state: E[T_0] = 0 and
// E[T_s] = 1 + sum_{k>=1} p_{s,k} E[T_k], solved exactly as (P - I) E = -1
// over states 1..n.
inline std::vector<Rational> hitting_times(const TransitionMatrix& pm) {
  int n = pm.n;
  std::vector<std::vector<Rational>> a(static_cast<std::size_t>(n),
                                       std::vector<Rational>(static_cast<std::size_t>(n)));
  std::vector<Rational> b(static_cast<std::size_t>(n), Rational(-1));
  for (int s = 1; s <= n; ++s)
    for (int k = 1; k <= n; ++k)
      a[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(k - 1)] =
          pm.at(s, k) - Rational(s == k ? 1 : 0);
  auto sol = solve_linear_system(std::move(a), std::move(b));
  std::vector<Rational> times(static_cast<std::size_t>(n) + 1, Rational(0));
  for (int s = 1; s <= n; ++s) times[static_cast<std::size_t>(s)] = sol[static_cast<std::size_t>(s - 1)];
  return times;
}

inline std::vector<Rational> hitting_times(const ChainSpec& spec) {
  if (spec.rate == 0) throw std::runtime_error("singular linear system: rate is 0");
  return hitting_times(build_transition_matrix(spec));
}

// Uniform-start expectation: E[T] = sum_k E[T_k] C(n,k) / 2^n.
inline Rational expected_total_time(const std::vector<Rational>& times, int n) {
  Rational acc(0);
  for (int k = 0; k <= n; ++k)
    acc += times[static_cast<std::size_t>(k)] * Rational(binomial(static_cast<unsigned long>(n), k));
  Integer denom = Integer(1) << n;
  return acc / Rational(denom);
}

inline Rational expected_total_time(const ChainSpec& spec) {
  return expected_total_time(hitting_times(spec), spec.n);
}

}  // namespace evomono
