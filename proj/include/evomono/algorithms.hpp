#pragma once

// The five optimizer loops: (1+1)-EA, (1+lambda)-EA, (1,lambda)-EA and the
// two self-adjusting variants, generic over any landscape.  A run ends when
// the parent reaches the all-ones optimum or the generation cap trips.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evomono/core.hpp"
#include "evomono/landscapes.hpp"

namespace evomono {

enum class Algo {
  OnePlusOne,
  OnePlusLambda,
  OneCommaLambda,
  SaOnePlusLambda,
  SaOneCommaLambda,
};

inline Algo parse_algo(std::string_view s) {
  if (s == "1+1") return Algo::OnePlusOne;
  if (s == "1+lambda") return Algo::OnePlusLambda;
  if (s == "1,lambda") return Algo::OneCommaLambda;
  if (s == "sa-1+lambda") return Algo::SaOnePlusLambda;
  if (s == "sa-1,lambda") return Algo::SaOneCommaLambda;
  throw std::invalid_argument("unknown algorithm: " + std::string(s));
}

inline std::string algo_name(Algo a) {
  switch (a) {
    case Algo::OnePlusOne: return "1+1";
    case Algo::OnePlusLambda: return "1+lambda";
    case Algo::OneCommaLambda: return "1,lambda";
    case Algo::SaOnePlusLambda: return "sa-1+lambda";
    case Algo::SaOneCommaLambda: return "sa-1,lambda";
  }
  return "?";
}

inline bool is_self_adjusting(Algo a) {
  return a == Algo::SaOnePlusLambda || a == Algo::SaOneCommaLambda;
}

struct EAConfig {
  std::optional<double> mutation_rate;        // default 1/n
  std::optional<double> lambda;               // fixed-lambda variants; default ceil(2 ln n)
  double update_strength = 1.15;              // F
  double success_ratio = 0.25;                // exponent control for the failure update
  double lambda_init = 1.0;
  double lambda_min = 1.0;
  std::optional<double> lambda_max;           // default n
  std::optional<std::uint64_t> generation_cap;  // default 1e4 * n^(3/2)
  bool record_trajectory = false;
  // The partially-ordered process has no defined multi-offspring selection;
  // ranking by the composite key is an opt-in extension.
  bool poea_extension = false;
  std::optional<BitString> start;             // default uniform random

  double rate_for(int n) const { return mutation_rate ? *mutation_rate : 1.0 / n; }
  double lambda_for(int n) const {
    return lambda ? *lambda : std::ceil(2.0 * std::log(static_cast<double>(n)));
  }
  double lambda_max_for(int n) const {
    return lambda_max ? *lambda_max : static_cast<double>(n);
  }
  std::uint64_t cap_for(int n) const {
    if (generation_cap) return *generation_cap;
    return static_cast<std::uint64_t>(1e4 * std::pow(static_cast<double>(n), 1.5));
  }

  void validate(int n, Algo algo) const {
    if (n < 1) throw std::invalid_argument("n must be positive");
    double p = rate_for(n);
    if (p < 0 || p > 1) throw std::invalid_argument("mutation rate outside [0, 1]");
    if (update_strength <= 1) throw std::invalid_argument("F must be > 1");
    if (success_ratio <= 0) throw std::invalid_argument("success_ratio must be > 0");
    if (!(1 <= lambda_min && lambda_min <= lambda_init && lambda_init <= lambda_max_for(n)))
      throw std::invalid_argument("need 1 <= lambda_min <= lambda_init <= lambda_max");
    if (algo == Algo::OnePlusLambda || algo == Algo::OneCommaLambda) {
      double l = lambda_for(n);
      if (l < 1 || l > 1e9) throw std::invalid_argument("lambda must be in [1, 1e9]");
    }
    if (start && start->size() != n) throw std::invalid_argument("start point has wrong length");
  }
};

struct TrajectoryPoint {
  std::uint64_t generation;
  int zeros;
  double lambda;
};

struct RunResult {
  std::uint64_t generations = 0;
  std::uint64_t evaluations = 0;
  bool hit_optimum = false;
  std::vector<TrajectoryPoint> trajectory;
};

// Round-half-up to an integer offspring count, clamped to the integers
// inside [lo, hi].
inline int offspring_count(double lambda, double lo, double hi) {
  double r = std::floor(lambda + 0.5);
  double lo_i = std::ceil(lo), hi_i = std::floor(hi);
  if (r < lo_i) r = lo_i;
  if (r > hi_i) r = hi_i;
  return static_cast<int>(r);
}

namespace detail {

inline void check_poea_usable(const LandscapeKind& kind, Algo algo, const EAConfig& cfg) {
  if (kind.is_poea() && algo != Algo::OnePlusOne && !cfg.poea_extension)
    throw std::invalid_argument(
        "the partially-ordered process defines selection only for (1+1); "
        "set poea_extension to rank offspring by the composite key");
}

inline BitString initial_point(int n, const EAConfig& cfg, RandomSource& rng) {
  return cfg.start ? *cfg.start : random_bitstring(n, rng);
}

}  // namespace detail

inline RunResult run_one_plus_one(const LandscapeKind& kind, int n, const EAConfig& cfg,
                                  RandomSource& rng) {
  cfg.validate(n, Algo::OnePlusOne);
  double p = cfg.rate_for(n);
  std::uint64_t cap = cfg.cap_for(n);
  BitString x = detail::initial_point(n, cfg, rng);
  RunResult res;
  if (cfg.record_trajectory) res.trajectory.push_back({0, x.zeros(), 1.0});
  while (!x.all_set()) {
    if (res.generations >= cap) return res;
    GenerationEvaluator ev = make_evaluator(kind, x, rng);
    BitString y = mutate(x, p, rng);
    ++res.generations;
    ++res.evaluations;
    if (ev.selects_offspring(y)) x = std::move(y);
    if (cfg.record_trajectory) res.trajectory.push_back({res.generations, x.zeros(), 1.0});
  }
  res.hit_optimum = true;
  return res;
}

// Shared loop for the fixed-lambda and self-adjusting population variants.
inline RunResult run_population(Algo algo, const LandscapeKind& kind, int n,
                                const EAConfig& cfg, RandomSource& rng) {
  cfg.validate(n, algo);
  detail::check_poea_usable(kind, algo, cfg);
  bool self_adjust = is_self_adjusting(algo);
  bool plus = algo == Algo::OnePlusLambda || algo == Algo::SaOnePlusLambda;
  double p = cfg.rate_for(n);
  std::uint64_t cap = cfg.cap_for(n);
  double lambda_max = cfg.lambda_max_for(n);
  double lambda = self_adjust ? cfg.lambda_init : cfg.lambda_for(n);
  double growth = std::pow(cfg.update_strength, 1.0 / cfg.success_ratio);

  BitString x = detail::initial_point(n, cfg, rng);
  RunResult res;
  if (cfg.record_trajectory) res.trajectory.push_back({0, x.zeros(), lambda});
  while (!x.all_set()) {
    if (res.generations >= cap) return res;
    int count = self_adjust
                    ? offspring_count(lambda, cfg.lambda_min, lambda_max)
                    : offspring_count(lambda, 1.0, std::numeric_limits<double>::infinity());
    GenerationEvaluator ev = make_evaluator(kind, x, rng);
    BitString best;
    FitnessKey best_key;
    for (int j = 0; j < count; ++j) {
      BitString y = mutate(x, p, rng);
      FitnessKey k = ev.key(y);
      if (j == 0 || k > best_key) {  // ties keep the lowest offspring index
        best = std::move(y);
        best_key = std::move(k);
      }
    }
    ++res.generations;
    res.evaluations += static_cast<std::uint64_t>(count);
    bool success = best_key > ev.parent_key();
    if (plus) {
      if (best_key >= ev.parent_key()) x = std::move(best);
    } else {
      x = std::move(best);
    }
    if (self_adjust) {
      lambda = success ? lambda / cfg.update_strength : lambda * growth;
      if (lambda < cfg.lambda_min) lambda = cfg.lambda_min;
      if (lambda > lambda_max) lambda = lambda_max;
    }
    if (cfg.record_trajectory) res.trajectory.push_back({res.generations, x.zeros(), lambda});
  }
  res.hit_optimum = true;
  return res;
}

inline RunResult run_one_plus_lambda(const LandscapeKind& kind, int n, const EAConfig& cfg,
                                     RandomSource& rng) {
  return run_population(Algo::OnePlusLambda, kind, n, cfg, rng);
}

inline RunResult run_one_comma_lambda(const LandscapeKind& kind, int n, const EAConfig& cfg,
                                      RandomSource& rng) {
  return run_population(Algo::OneCommaLambda, kind, n, cfg, rng);
}

inline RunResult run_self_adjusting(Algo algo, const LandscapeKind& kind, int n,
                                    const EAConfig& cfg, RandomSource& rng) {
  if (!is_self_adjusting(algo))
    throw std::invalid_argument("run_self_adjusting expects a self-adjusting variant");
  return run_population(algo, kind, n, cfg, rng);
}

inline RunResult run_algorithm(Algo algo, const LandscapeKind& kind, int n,
                               const EAConfig& cfg, RandomSource& rng) {
  if (algo == Algo::OnePlusOne) return run_one_plus_one(kind, n, cfg, rng);
  return run_population(algo, kind, n, cfg, rng);
}

}  // namespace evomono
