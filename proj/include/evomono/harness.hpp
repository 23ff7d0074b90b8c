#pragma once

// Experiment orchestration: deterministic parallel Monte-Carlo sweeps,
// aggregation, CSV emission (plot-ready, data-only), log-log exponent fits,
// exact-chain table emission, and the brute-force verification driver.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "evomono/algorithms.hpp"
#include "evomono/core.hpp"
#include "evomono/drift.hpp"
#include "evomono/landscapes.hpp"
#include "evomono/markov.hpp"

namespace evomono {

constexpr int kSchemaVersion = 1;
constexpr int kDefaultSolverBound = 60;

struct ExperimentSpec {
  Algo algo = Algo::OnePlusOne;
  LandscapeKind landscape;
  std::vector<int> n_values;
  int runs = 500;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  EAConfig ea;
  bool drop_failures = false;  // default: cap hits stay in the means, flagged

  void validate() const {
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (n_values.empty()) throw std::invalid_argument("no n values given");
    for (std::size_t i = 1; i < n_values.size(); ++i)
      if (n_values[i] <= n_values[i - 1])
        throw std::invalid_argument("n values must be strictly increasing");
  }
};

struct RawRow {
  int n = 0;
  int run_index = 0;
  std::uint64_t generations = 0;
  std::uint64_t evaluations = 0;
  bool hit_optimum = false;
};

struct AggregateRow {
  int n = 0;
  int runs = 0;
  int failures = 0;
  long double mean_generations = 0, std_generations = 0;
  long double mean_evaluations = 0, std_evaluations = 0;
};

// Sample mean / sample standard deviation (divisor m-1) over the selected
// runs, in a fixed accumulation order so aggregates are recomputable from the
// raw rows bit for bit.
inline AggregateRow aggregate_rows(int n, const std::vector<RawRow>& raw, bool drop_failures) {
  AggregateRow row;
  row.n = n;
  std::vector<const RawRow*> sel;
  for (const auto& r : raw)
    if (r.n == n) {
      ++row.runs;
      if (!r.hit_optimum) ++row.failures;
      if (!drop_failures || r.hit_optimum) sel.push_back(&r);
    }
  if (sel.empty()) return row;
  long double sg = 0, se = 0;
  for (const auto* r : sel) {
    sg += static_cast<long double>(r->generations);
    se += static_cast<long double>(r->evaluations);
  }
  auto m = static_cast<long double>(sel.size());
  row.mean_generations = sg / m;
  row.mean_evaluations = se / m;
  if (sel.size() > 1) {
    long double vg = 0, ve = 0;
    for (const auto* r : sel) {
      long double dg = static_cast<long double>(r->generations) - row.mean_generations;
      long double de = static_cast<long double>(r->evaluations) - row.mean_evaluations;
      vg += dg * dg;
      ve += de * de;
    }
    row.std_generations = std::sqrt(vg / (m - 1));
    row.std_evaluations = std::sqrt(ve / (m - 1));
  }
  return row;
}

struct ExperimentResult {
  std::vector<AggregateRow> rows;
  std::vector<RawRow> raw;
};

// Work queue of (n, run) tasks.  Task t always runs with the child seed
// derived from (master seed, t), so results are independent of worker count
// and scheduling; rows come out sorted by (n, run index).
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  for (int n : spec.n_values) {
    spec.ea.validate(n, spec.algo);
    detail::check_poea_usable(spec.landscape, spec.algo, spec.ea);
  }
  std::size_t total = spec.n_values.size() * static_cast<std::size_t>(spec.runs);
  ExperimentResult result;
  result.raw.resize(total);
  auto run_task = [&](std::size_t t) {
    int n = spec.n_values[t / static_cast<std::size_t>(spec.runs)];
    int run_index = static_cast<int>(t % static_cast<std::size_t>(spec.runs));
    RandomSource rng = RandomSource::child(spec.master_seed, t);
    RunResult r = run_algorithm(spec.algo, spec.landscape, n, spec.ea, rng);
    result.raw[t] = {n, run_index, r.generations, r.evaluations, r.hit_optimum};
  };
  if (spec.jobs == 1) {
    for (std::size_t t = 0; t < total; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      try {
        for (;;) {
          std::size_t t = next.fetch_add(1);
          if (t >= total) return;
          run_task(t);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(spec.jobs));
    for (int i = 0; i < spec.jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  for (int n : spec.n_values) result.rows.push_back(aggregate_rows(n, result.raw, spec.drop_failures));
  return result;
}

inline std::string format_fixed(long double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lf", digits, v);
  return buf;
}

inline void write_metadata(std::ostream& os) {
  os << "# schema_version=" << kSchemaVersion << "\n"
     << "# generator=" << RandomSource::kGeneratorId << "\n"
     << "# child_seed=" << RandomSource::kChildSeedId << "\n"
     << "# lambda_rounding=half-up,min=1\n"
     << "# evaluation_counting=offspring-only\n";
}

inline void write_aggregate_csv(std::ostream& os, const ExperimentSpec& spec,
                                const std::vector<AggregateRow>& rows) {
  write_metadata(os);
  os << "n,algo,landscape,runs,failures,mean_generations,std_generations,"
        "mean_evaluations,std_evaluations,seed,schema_version\n";
  for (const auto& r : rows) {
    os << r.n << ',' << algo_name(spec.algo) << ',' << spec.landscape.selector() << ','
       << r.runs << ',' << r.failures << ',' << format_fixed(r.mean_generations, 6) << ','
       << format_fixed(r.std_generations, 6) << ',' << format_fixed(r.mean_evaluations, 6)
       << ',' << format_fixed(r.std_evaluations, 6) << ',' << spec.master_seed << ','
       << kSchemaVersion << "\n";
  }
}

inline void write_raw_csv(std::ostream& os, const std::vector<RawRow>& raw) {
  os << "n,run_index,generations,evaluations,hit_optimum\n";
  for (const auto& r : raw)
    os << r.n << ',' << r.run_index << ',' << r.generations << ',' << r.evaluations << ','
       << (r.hit_optimum ? 1 : 0) << "\n";
}

inline std::vector<RawRow> read_raw_csv(std::istream& is) {
  std::vector<RawRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    RawRow r;
    unsigned long long gens = 0, evals = 0;
    int hit = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%llu,%llu,%d", &r.n, &r.run_index, &gens, &evals,
                    &hit) == 5) {
      r.generations = gens;
      r.evaluations = evals;
      r.hit_optimum = hit != 0;
      rows.push_back(r);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Log-log exponent fit.

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double residual_rms = 0;
};

inline FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> xs, ys;
  for (auto [n, mean] : points) {
    if (n <= 0 || mean <= 0)
      throw std::invalid_argument("fit_exponent: n and means must be positive");
    xs.push_back(std::log(n));
    ys.push_back(std::log(mean));
  }
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4)
    throw std::invalid_argument("fit_exponent: need at least 4 distinct n values");
  double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = m * sxx - sx * sx;
  FitResult fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / m);
  return fit;
}

enum class FitMetric { Generations, Evaluations };

inline FitResult fit_exponent(const std::vector<AggregateRow>& rows, FitMetric metric) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    pts.emplace_back(static_cast<double>(r.n),
                     static_cast<double>(metric == FitMetric::Generations ? r.mean_generations
                                                                          : r.mean_evaluations));
  return fit_exponent(pts);
}

// Minimal aggregate-CSV reader for the fit command: pulls (n, mean) pairs.
inline std::vector<std::pair<double, double>> read_aggregate_means(std::istream& is,
                                                                   FitMetric metric) {
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() < 11) continue;
    double n = std::stod(fields[0]);
    double mean = std::stod(metric == FitMetric::Generations ? fields[5] : fields[7]);
    pts.emplace_back(n, mean);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Exact-chain table emission.

struct SolverBoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_solver_bound(int n, int bound) {
  if (n > bound)
    throw SolverBoundError("exact solver bound exceeded: n = " + std::to_string(n) +
                           " > bound " + std::to_string(bound) +
                           " (raise --bound to override)");
}

inline void write_exact_csv(std::ostream& os, const ChainSpec& spec) {
  TransitionMatrix pm = build_transition_matrix(spec);
  auto times = hitting_times(pm);
  os << "state,p_absorb_row_check,drift_exact,drift_decimal,hitting_time_fraction,"
        "hitting_time_decimal\n";
  for (int s = 0; s <= spec.n; ++s) {
    Rational drift(0);
    for (int k = 0; k <= spec.n; ++k)
      if (k != s) drift += Rational(s - k) * pm.at(s, k);
    os << s << ',' << to_fraction_string(pm.row_sum(s)) << ',' << to_fraction_string(drift)
       << ',' << to_decimal_string(drift, 5) << ',' << to_fraction_string(times[static_cast<std::size_t>(s)])
       << ',' << to_decimal_string(times[static_cast<std::size_t>(s)], 4) << "\n";
  }
  Rational et = expected_total_time(times, spec.n);
  os << "E[T],,,," << to_fraction_string(et) << ',' << to_decimal_string(et, 4) << "\n";
}

// Per odd n: expected times at cutoffs n/2, n/2-1, n/2-2 and their offsets
// from the n/2 baseline.
inline void write_cutoff_sweep_csv(std::ostream& os, const std::vector<int>& n_values,
                                   const Rational* rate = nullptr) {
  for (int n : n_values)
    if (n % 2 == 0 || n < 5)
      throw std::invalid_argument("cutoff sweep expects odd n >= 5");
  os << "n,cutoff,expected_time_fraction,expected_time_decimal,diff_fraction,diff_decimal\n";
  for (int n : n_values) {
    Rational p = rate ? *rate : make_rational(1, n);
    Rational base_et;
    for (int k = 0; k < 3; ++k) {
      Rational cutoff = make_rational(n - 2 * k, 2);
      ChainSpec spec(n, cutoff, p);
      Rational et = expected_total_time(spec);
      if (k == 0) base_et = et;
      Rational diff = et - base_et;
      os << n << ',' << to_decimal_string(cutoff, 1) << ',' << to_fraction_string(et) << ','
         << to_decimal_string(et, 4) << ',' << to_fraction_string(diff) << ','
         << to_decimal_string(diff, 6) << "\n";
    }
  }
}

inline void write_drift_table_csv(std::ostream& os, int n, const std::vector<Rational>& cutoffs,
                                  const Rational& rate) {
  os << "n,cutoff,state,drift_fraction,drift_decimal\n";
  for (const auto& c : cutoffs) {
    ChainSpec spec(n, c, rate);
    for (int s = 0; s <= n; ++s) {
      Rational d = state_drift(spec, s);
      os << n << ',' << to_decimal_string(c, 1) << ',' << s << ',' << to_fraction_string(d)
         << ',' << to_decimal_string(d, 5) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Verification driver (drift minimality and the flip-class certificates).

struct VerifyOptions {
  std::vector<int> minimality_n{6, 8};
  std::vector<double> extra_rates{0.5, 0.9};  // 1/n is always included
  int random_rules = 50;
  std::uint64_t seed = 1;
  std::vector<int> lemma_n{4, 5, 6, 7, 8};
  long double slack = 1e-12L;
};

struct VerifyReport {
  long long minimality_violations = 0;
  long long lemma3_violations = 0;
  long long lemma4_mismatches = 0;
  std::vector<MinimalityViolation> witnesses;

  bool ok() const {
    return minimality_violations == 0 && lemma3_violations == 0 && lemma4_mismatches == 0;
  }
};

inline std::vector<AcceptanceRule> standard_rule_list(int n, int random_rules,
                                                      std::uint64_t seed) {
  std::vector<AcceptanceRule> rules{adbv_rule(), fdbv_rule(), onemax_rule(), binval_rule()};
  RandomSource rng = RandomSource::child(seed, static_cast<std::uint64_t>(n));
  for (int i = 0; i < random_rules; ++i) rules.push_back(random_linear_rule(n, i, rng));
  return rules;
}

inline VerifyReport run_verification(const VerifyOptions& opt, std::ostream& log) {
  VerifyReport report;
  for (int n : opt.minimality_n) {
    auto rules = standard_rule_list(n, opt.random_rules, opt.seed);
    std::vector<double> rates{1.0 / n};
    rates.insert(rates.end(), opt.extra_rates.begin(), opt.extra_rates.end());
    for (double p : rates) {
      MinimalityReport r = minimality_suite(n, p, rules, opt.slack);
      report.minimality_violations += static_cast<long long>(r.violations.size());
      for (auto& v : r.violations) report.witnesses.push_back(v);
      log << "minimality n=" << n << " rate=" << format_fixed(p, 6)
          << " rules=" << r.rules_checked << " points=" << r.points_checked
          << " violations=" << r.violations.size() << "\n";
    }
  }
  for (int n : opt.lemma_n) {
    auto rules = standard_rule_list(n, opt.random_rules, opt.seed + 1);
    AcceptanceRule sdbv = sdbv_rule(static_cast<double>(n) / 2.0);
    long long checked = 0, neg = 0;
    long long min_q = 0;
    bool have_min = false;
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
      BitString x(n);
      for (int b = 0; b < n; ++b)
        if ((bits >> b) & 1u) x.set(b, true);
      for (int i = 2; i <= n; ++i)
        for (int j = 1; j < i; ++j)
          for (const auto& f : rules) {
            long long q = lemma3_quantity(x, f, sdbv, i, j);
            ++checked;
            if (!have_min || q < min_q) {
              min_q = q;
              have_min = true;
            }
            if (q < 0) ++neg;
          }
    }
    report.lemma3_violations += neg;
    log << "lemma3 n=" << n << " checked=" << checked << " min=" << min_q
        << " violations=" << neg << "\n";
    long long classes = 0, mismatches = 0;
    for (int z = 0; z <= n; ++z) {
      BitString x(n);
      for (int b = z; b < n; ++b) x.set(b, true);  // canonical point with z zeros
      for (int i = 2; i <= n; ++i)
        for (int j = 1; j < i; ++j) {
          DominationCounts c = lemma4_domination_count(x, i, j);
          Integer want_a = binomial(static_cast<unsigned long>(i), i - j) *
                           binomial(static_cast<unsigned long>(std::max(0, n - z - j)), i - j);
          Integer want_b = binomial(static_cast<unsigned long>(i), i - j) *
                           binomial(static_cast<unsigned long>(std::max(0, z - j)), i - j);
          ++classes;
          for (long long v : c.per_a)
            if (v != want_a.get_si()) ++mismatches;
          for (long long v : c.per_b)
            if (v != want_b.get_si()) ++mismatches;
        }
    }
    report.lemma4_mismatches += mismatches;
    log << "lemma4 n=" << n << " classes=" << classes << " mismatches=" << mismatches << "\n";
  }
  log << (report.ok() ? "verify: OK" : "verify: FAIL") << "\n";
  return report;
}

inline void write_witness_csv(std::ostream& os, const std::vector<MinimalityViolation>& ws) {
  os << "point,rule,sdbv_drift,rule_drift\n";
  for (const auto& w : ws)
    os << w.point << ',' << w.rule << ',' << format_fixed(w.sdbv_drift, 17) << ','
       << format_fixed(w.rule_drift, 17) << "\n";
}

}  // namespace evomono
