// Command-line front end: Monte-Carlo sweeps, exact chain tables, cutoff
// sweeps, drift tables, the brute-force verification suite, and log-log fits.
// Exit codes: 0 success, 1 usage error, 2 verification violation, 3 exact
// solver bound refusal.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "evomono/harness.hpp"

namespace {

using namespace evomono;

// Reads both flat key=value files (delegated to the stock INI reader) and a
// single JSON document whose keys are long option names.
class FlexibleConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buffer;
    buffer << input.rdbuf();
    std::string text = buffer.str();
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return from_json(text);
    std::stringstream replay(text);
    return CLI::ConfigBase::from_config(replay);
  }

 private:
  static std::vector<CLI::ConfigItem> from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    if (!doc.is_object())
      throw CLI::FileError("config JSON must be a single object of option values");
    std::vector<CLI::ConfigItem> items;
    for (auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array())
        for (auto& v : value) item.inputs.push_back(scalar_to_string(v));
      else
        item.inputs.push_back(scalar_to_string(value));
      items.push_back(std::move(item));
    }
    return items;
  }

  static std::string scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();  // numbers and booleans in their literal spelling
  }
};

// "a/b", decimal ("0.25"), or integer text as an exact fraction.
Rational parse_rational(const std::string& text) {
  auto bad = [&] { return CLI::ValidationError("cannot parse '" + text + "' as a fraction"); };
  if (text.empty()) throw bad();
  if (auto slash = text.find('/'); slash != std::string::npos) {
    try {
      Rational r(text, 10);
      if (r.get_den() == 0) throw bad();
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      throw bad();
    }
  }
  std::string digits;
  long frac_digits = -1;
  for (char c : text) {
    if (c == '.') {
      if (frac_digits >= 0) throw bad();
      frac_digits = 0;
      continue;
    }
    if (c == '-' && digits.empty() && frac_digits < 0) {
      digits.push_back(c);
      continue;
    }
    if (c < '0' || c > '9') throw bad();
    digits.push_back(c);
    if (frac_digits >= 0) ++frac_digits;
  }
  if (digits.empty() || digits == "-") throw bad();
  try {
    Rational r{Integer(digits, 10)};
    if (frac_digits > 0) {
      Integer scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
      r /= Rational(scale);
    }
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

std::vector<int> expand_n_values(std::vector<int> ns, const std::string& range) {
  if (!range.empty()) {
    int a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::stringstream ss(range);
    if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step < 1 || a > b)
      throw CLI::ValidationError("--n-range expects A:B:STEP with A <= B, STEP >= 1");
    for (int n = a; n <= b; n += step) ns.push_back(n);
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty()) throw CLI::ValidationError("no n values given (use --n or --n-range)");
  return ns;
}

// Writes through a stream chosen by path ("-" = stdout).
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  fn(out);
}

struct CommonSimFlags {
  std::string algo = "1+1";
  std::string landscape = "sdbv";
  std::vector<int> ns;
  std::string n_range;
  int runs = 500;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out = "-";
  std::string raw_out;
  std::string rate;
  double lambda = 0;  // 0 = default ceil(2 ln n)
  double big_f = 1.15;
  double success_ratio = 0.25;
  double lambda_init = 1.0;
  double lambda_min = 1.0;
  double lambda_max = 0;  // 0 = default n
  std::uint64_t cap = 0;  // 0 = default 1e4 n^(3/2)
  std::string start;
  bool drop_failures = false;
  bool poea_extension = false;
};

void add_config_option(CLI::App* sub) {
  sub->add_option("--config", "config file: flat key=value lines or one JSON object");
}

// Config handling happens before the real parse: values from the file become
// ordinary "--key=value" tokens spliced in after the subcommand name, except
// for keys the command line already sets (flags override file values).
std::vector<std::string> expand_config_args(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError("cannot read config file: " + path);
  std::vector<CLI::ConfigItem> items = FlexibleConfig().from_config(in);
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  std::vector<std::string> out{args.front()};
  for (const auto& item : items) {
    if (item.name == "config") continue;
    std::string flag = "--" + item.name;
    if (given.count(flag)) continue;
    if (item.inputs.empty())
      out.push_back(flag);  // bare key acts as a switch
    else
      for (const auto& v : item.inputs) out.push_back(flag + "=" + v);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

int cmd_simulate(const CommonSimFlags& f) {
  ExperimentSpec spec;
  spec.algo = parse_algo(f.algo);
  spec.landscape = LandscapeKind::parse(f.landscape);
  spec.n_values = expand_n_values(f.ns, f.n_range);
  spec.runs = f.runs;
  spec.master_seed = f.seed;
  spec.jobs = f.jobs;
  spec.drop_failures = f.drop_failures;
  spec.ea.poea_extension = f.poea_extension;
  if (!f.rate.empty()) spec.ea.mutation_rate = parse_rational(f.rate).get_d();
  if (f.lambda != 0) spec.ea.lambda = f.lambda;
  spec.ea.update_strength = f.big_f;
  spec.ea.success_ratio = f.success_ratio;
  spec.ea.lambda_init = f.lambda_init;
  spec.ea.lambda_min = f.lambda_min;
  if (f.lambda_max != 0) spec.ea.lambda_max = f.lambda_max;
  if (f.cap != 0) spec.ea.generation_cap = f.cap;
  if (!f.start.empty()) spec.ea.start = BitString::parse(f.start);

  ExperimentResult result = run_experiment(spec);
  with_output(f.out, [&](std::ostream& os) { write_aggregate_csv(os, spec, result.rows); });
  if (!f.raw_out.empty())
    with_output(f.raw_out, [&](std::ostream& os) { write_raw_csv(os, result.raw); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"runtime laboratory for evolutionary algorithms on dynamic monotone landscapes"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- simulate ----
  auto sim = std::make_shared<CommonSimFlags>();
  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo runs, aggregate CSV out");
  add_config_option(simulate);
  simulate->add_option("--algo", sim->algo, "1+1 | 1+lambda | 1,lambda | sa-1+lambda | sa-1,lambda");
  simulate->add_option("--landscape", sim->landscape,
                       "onemax|binval|dbv|noisy-linear|adbv|fdbv|sdbv[:cutoff=C]|poea[:q=Q]|poea-minus");
  simulate->add_option("--n", sim->ns, "problem size (repeatable)");
  simulate->add_option("--n-range", sim->n_range, "A:B:STEP inclusive range of problem sizes");
  simulate->add_option("--runs", sim->runs, "runs per n")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim->seed, "master seed");
  simulate->add_option("--jobs", sim->jobs, "worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim->out, "aggregate CSV path, - for stdout");
  simulate->add_option("--raw-out", sim->raw_out, "per-run CSV path");
  simulate->add_option("--rate", sim->rate, "mutation rate NUM/DEN or decimal (default 1/n)");
  simulate->add_option("--lambda", sim->lambda, "offspring count (default ceil(2 ln n))");
  simulate->add_option("--F", sim->big_f, "self-adjusting update strength");
  simulate->add_option("--success-ratio", sim->success_ratio, "self-adjusting success ratio");
  simulate->add_option("--lambda-init", sim->lambda_init, "self-adjusting initial lambda");
  simulate->add_option("--lambda-min", sim->lambda_min, "lower lambda bound");
  simulate->add_option("--lambda-max", sim->lambda_max, "upper lambda bound (default n)");
  simulate->add_option("--cap", sim->cap, "generation cap (default 1e4 n^1.5)");
  simulate->add_option("--start", sim->start, "fixed start point as a 0/1 string");
  simulate->add_flag("--drop-failures", sim->drop_failures, "exclude cap-hit runs from means");
  simulate->add_flag("--poea-extension", sim->poea_extension,
                     "allow poea with populations via the composite-key extension");
  simulate->callback([sim, &exit_code] { exit_code = cmd_simulate(*sim); });

  // ---- exact ----
  auto ex_n = std::make_shared<int>(9);
  auto ex_cutoff = std::make_shared<std::string>();
  auto ex_rate = std::make_shared<std::string>();
  auto ex_out = std::make_shared<std::string>("-");
  auto ex_bound = std::make_shared<int>(kDefaultSolverBound);
  CLI::App* exact = app.add_subcommand("exact", "exact chain: drifts, hitting times, E[T]");
  add_config_option(exact);
  exact->add_option("--n", *ex_n, "problem size")->required();
  exact->add_option("--cutoff", *ex_cutoff, "regime cutoff, fraction or decimal (default n/2)");
  exact->add_option("--rate", *ex_rate, "mutation rate NUM/DEN (default 1/n)");
  exact->add_option("--out", *ex_out, "CSV path, - for stdout");
  exact->add_option("--bound", *ex_bound, "largest n the exact solver accepts");
  exact->callback([=] {
    check_solver_bound(*ex_n, *ex_bound);
    Rational cutoff = ex_cutoff->empty() ? make_rational(*ex_n, 2) : parse_rational(*ex_cutoff);
    Rational rate = ex_rate->empty() ? make_rational(1, *ex_n) : parse_rational(*ex_rate);
    if (rate <= 0 || rate >= 1) throw CLI::ValidationError("--rate must satisfy 0 < p < 1");
    ChainSpec spec(*ex_n, cutoff, rate);
    with_output(*ex_out, [&](std::ostream& os) { write_exact_csv(os, spec); });
  });

  // ---- cutoff-sweep ----
  auto sw_ns = std::make_shared<std::vector<int>>();
  auto sw_range = std::make_shared<std::string>();
  auto sw_rate = std::make_shared<std::string>();
  auto sw_out = std::make_shared<std::string>("-");
  auto sw_bound = std::make_shared<int>(kDefaultSolverBound);
  CLI::App* sweep = app.add_subcommand("cutoff-sweep",
                                       "E[T] at cutoffs n/2, n/2-1, n/2-2 for odd n");
  add_config_option(sweep);
  sweep->add_option("--n", *sw_ns, "odd problem size (repeatable)");
  sweep->add_option("--n-range", *sw_range, "A:B:STEP range of odd problem sizes");
  sweep->add_option("--rate", *sw_rate, "mutation rate NUM/DEN (default 1/n)");
  sweep->add_option("--out", *sw_out, "CSV path, - for stdout");
  sweep->add_option("--bound", *sw_bound, "largest n the exact solver accepts");
  sweep->callback([=] {
    auto ns = expand_n_values(*sw_ns, *sw_range);
    for (int n : ns) check_solver_bound(n, *sw_bound);
    std::optional<Rational> rate;
    if (!sw_rate->empty()) {
      rate = parse_rational(*sw_rate);
      if (*rate <= 0 || *rate >= 1) throw CLI::ValidationError("--rate must satisfy 0 < p < 1");
    }
    with_output(*sw_out, [&](std::ostream& os) {
      write_cutoff_sweep_csv(os, ns, rate ? &*rate : nullptr);
    });
  });

  // ---- drift-table ----
  auto dt_n = std::make_shared<int>(9);
  auto dt_cutoffs = std::make_shared<std::vector<std::string>>();
  auto dt_rate = std::make_shared<std::string>();
  auto dt_out = std::make_shared<std::string>("-");
  auto dt_bound = std::make_shared<int>(kDefaultSolverBound);
  CLI::App* drift_table = app.add_subcommand("drift-table", "per-state drift table");
  add_config_option(drift_table);
  drift_table->add_option("--n", *dt_n, "problem size")->required();
  drift_table->add_option("--cutoff", *dt_cutoffs,
                          "cutoff, repeatable (default n/2, n/2-1, n/2-2)");
  drift_table->add_option("--rate", *dt_rate, "mutation rate NUM/DEN (default 1/n)");
  drift_table->add_option("--out", *dt_out, "CSV path, - for stdout");
  drift_table->add_option("--bound", *dt_bound, "largest n the exact solver accepts");
  drift_table->callback([=] {
    check_solver_bound(*dt_n, *dt_bound);
    Rational rate = dt_rate->empty() ? make_rational(1, *dt_n) : parse_rational(*dt_rate);
    std::vector<Rational> cutoffs;
    if (dt_cutoffs->empty())
      for (int k = 0; k < 3; ++k) cutoffs.push_back(make_rational(*dt_n - 2 * k, 2));
    else
      for (const auto& c : *dt_cutoffs) cutoffs.push_back(parse_rational(c));
    with_output(*dt_out, [&](std::ostream& os) {
      write_drift_table_csv(os, *dt_n, cutoffs, rate);
    });
  });

  // ---- verify ----
  auto vf = std::make_shared<VerifyOptions>();
  auto vf_witnesses = std::make_shared<std::string>();
  auto vf_slack = std::make_shared<double>(1e-12);
  CLI::App* verify = app.add_subcommand("verify", "drift-minimality and flip-class certificates");
  add_config_option(verify);
  verify->add_option("--n", vf->minimality_n, "minimality sizes (repeatable, default 6 8)");
  verify->add_option("--rates", vf->extra_rates, "extra mutation rates beside 1/n");
  verify->add_option("--random-rules", vf->random_rules, "number of random linear rules");
  verify->add_option("--seed", vf->seed, "seed for the random rules");
  verify->add_option("--lemma-n", vf->lemma_n, "certificate sizes (repeatable, default 4..8)");
  verify->add_option("--slack", *vf_slack, "comparison slack for drift minimality");
  verify->add_option("--witnesses", *vf_witnesses, "CSV path for violation witnesses");
  verify->callback([vf, vf_witnesses, vf_slack, &exit_code] {
    vf->slack = static_cast<long double>(*vf_slack);
    for (int n : vf->minimality_n)
      if (n < 1 || n > 12) throw CLI::ValidationError("--n must lie in [1, 12]");
    for (int n : vf->lemma_n)
      if (n < 2 || n > 14) throw CLI::ValidationError("--lemma-n must lie in [2, 14]");
    VerifyReport report = run_verification(*vf, std::cout);
    if (!vf_witnesses->empty())
      with_output(*vf_witnesses,
                  [&](std::ostream& os) { write_witness_csv(os, report.witnesses); });
    exit_code = report.ok() ? 0 : 2;
  });

  // ---- fit ----
  auto fit_in = std::make_shared<std::string>();
  auto fit_metric = std::make_shared<std::string>("generations");
  CLI::App* fit = app.add_subcommand("fit", "log-log exponent fit over an aggregate CSV");
  add_config_option(fit);
  fit->add_option("--in", *fit_in, "aggregate CSV path, - for stdin")->required();
  fit->add_option("--metric", *fit_metric, "generations | evaluations")
      ->check(CLI::IsMember({"generations", "evaluations"}));
  fit->callback([=] {
    FitMetric metric =
        *fit_metric == "evaluations" ? FitMetric::Evaluations : FitMetric::Generations;
    std::vector<std::pair<double, double>> pts;
    if (*fit_in == "-") {
      pts = read_aggregate_means(std::cin, metric);
    } else {
      std::ifstream in(*fit_in);
      if (!in) throw std::runtime_error("cannot open input file: " + *fit_in);
      pts = read_aggregate_means(in, metric);
    }
    FitResult r = fit_exponent(pts);
    std::cout << "points=" << pts.size() << " slope=" << format_fixed(r.slope, 6)
              << " intercept=" << format_fixed(r.intercept, 6)
              << " residual_rms=" << format_fixed(r.residual_rms, 6) << "\n";
  });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config_args(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const SolverBoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
