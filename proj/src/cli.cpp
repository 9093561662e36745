#include "rmflab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "rmflab/acceptance.hpp"
#include "rmflab/analysis.hpp"
#include "rmflab/budget.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/montecarlo.hpp"
#include "rmflab/records.hpp"
#include "rmflab/rmf.hpp"
#include "rmflab/sieve.hpp"
#include "rmflab/summation.hpp"
#include "rmflab/version.hpp"

namespace rmflab {
namespace {

struct Key {
  const char* name;
  const char* help;
  const char* fallback;  // nullptr: no default
};

// Every option is also a config-file key of the same name.
constexpr Key kKeys[] = {
    {"model", "process: rmf, rmf-all-plus, rmf-all-minus, iid_rademacher, harmonic_rademacher, "
              "sidon_cosine, bounded_martingale", "rmf"},
    {"x", "comma-separated x values", nullptr},
    {"x-range", "log-spaced grid lo:hi:count", nullptr},
    {"x-ell", "x_l grid eps:ell_max", nullptr},
    {"x-min", "drop grid points below this", nullptr},
    {"x-max", "drop grid points above this", nullptr},
    {"loglog", "comma-separated log log x values (lambda only)", nullptr},
    {"N", "grid depth", "8"},
    {"samples", "Monte Carlo samples", "1000"},
    {"seed", "master seed (drawn from system entropy when omitted, except selftest)", nullptr},
    {"q", "comma-separated moment orders", "1,2"},
    {"epsilon", "event threshold epsilon", "0.1"},
    {"delta", "event threshold delta", "0.1"},
    {"out", "output file; a manifest is written next to it", nullptr},
    {"format", "csv or jsonl", "csv"},
    {"workers", "sampling threads", "1"},
    {"only", "selftest: comma-separated criterion numbers", nullptr},
};

const char* const kNotes[] = {
    "sign changes skip zeros; V(a,b] uses the last nonzero sign at or before a",
    "sidon_cosine steps are sqrt(2) cos(n_k U) so that E X_k^2 = 1",
    "records with n_samples = 0 are exact values",
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ParameterError("--" + key + ": '" + s + "' is not a number");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    // Allow 1e5-style counts when they are exact integers.
    const double d = to_double(key, s);
    if (d < 0 || d != std::floor(d) || d > 1.8e19) {
      throw ParameterError("--" + key + ": '" + s + "' is not a nonnegative integer");
    }
    return static_cast<std::uint64_t>(d);
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ParameterError("--" + key + ": '" + s + "' is out of range");
  }
}

/// Flat key=value file; '#' starts a comment; unknown keys are rejected.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                   [&](const Key& k) { return key == k.name; });
    if (!known) throw ParameterError(path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParameterError("missing --" + key);
    return it->second;
  }
  double real(const std::string& key) const { return to_double(key, str(key)); }
  std::uint64_t count(const std::string& key) const { return to_unsigned(key, str(key)); }
  int integer(const std::string& key) const {
    const auto v = count(key);
    if (v > 1'000'000'000) throw ParameterError("--" + key + " is too large");
    return static_cast<int>(v);
  }
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(str(key), ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw ParameterError("--" + key + " is empty");
    return out;
  }
  const std::map<std::string, std::string>& all() const { return values_; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<double> x_grid(const Settings& s) {
  std::vector<double> grid;
  int sources = 0;
  if (s.has("x")) {
    ++sources;
    grid = s.reals("x");
  }
  if (s.has("x-range")) {
    ++sources;
    const auto parts = split(s.str("x-range"), ':');
    if (parts.size() != 3) throw ParameterError("--x-range expects lo:hi:count");
    const double lo = to_double("x-range", parts[0]);
    const double hi = to_double("x-range", parts[1]);
    const auto count = to_unsigned("x-range", parts[2]);
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ParameterError("--x-range needs 0 < lo <= hi, count >= 1");
    for (std::uint64_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      grid.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
    }
  }
  if (s.has("x-ell")) {
    ++sources;
    const auto parts = split(s.str("x-ell"), ':');
    if (parts.size() != 2) throw ParameterError("--x-ell expects eps:ell_max");
    grid = x_ell_grid(to_double("x-ell", parts[0]), static_cast<int>(to_unsigned("x-ell", parts[1])));
  }
  if (sources == 0) throw ParameterError("no x grid: give --x, --x-range or --x-ell");
  if (sources > 1) throw ParameterError("give only one of --x, --x-range, --x-ell");
  const double lo = s.has("x-min") ? s.real("x-min") : -INFINITY;
  const double hi = s.has("x-max") ? s.real("x-max") : INFINITY;
  std::erase_if(grid, [&](double x) { return x < lo || x > hi; });
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw ParameterError("x grid is empty after --x-min/--x-max");
  return grid;
}

struct Context {
  Settings settings;
  std::string command;
  std::uint64_t seed = 0;
  std::string seed_source;
  std::ostream& err;

  ExperimentPlan plan(bool with_grid = true) const {
    ExperimentPlan p;
    p.process = parse_process(settings.str("model"));
    if (with_grid) p.x_grid = x_grid(settings);
    p.N = settings.integer("N");
    p.samples = settings.count("samples");
    p.master_seed = seed;
    p.epsilon = settings.real("epsilon");
    p.delta = settings.real("delta");
    p.q_list = settings.reals("q");
    p.workers = static_cast<unsigned>(settings.integer("workers"));
    p.validate();
    return p;
  }

  void warn(const std::string& message) const { err << "rmflab: warning: " << message << '\n'; }
};

double exact_or_nan(const auto& fn) {
  try {
    return fn();
  } catch (const ResourceError&) {
    return std::nan("");
  }
}

std::vector<ResultRecord> cmd_simulate(const Context& c) {
  const auto plan = c.plan();
  const auto name = process_name(plan.process);
  std::vector<std::uint64_t> cps;
  for (double x : plan.x_grid) cps.push_back(position_of(x));
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, cps, plan.workers);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    const auto u = position_of(x);
    for (double q : plan.q_list) {
      out.push_back(make_record("simulate", "E|M|^q", name, x, plan.N, q, moment_estimate(set, u, q, plan.master_seed)));
    }
    out.push_back(make_record("simulate", "E V", name, x, plan.N, 0.0, expected_v_estimate(set, u, plan.master_seed)));
  }
  return out;
}

std::vector<ResultRecord> cmd_moments(const Context& c) {
  const auto plan = c.plan();
  const auto name = process_name(plan.process);
  const bool rmf = std::holds_alternative<RmfSpec>(plan.process);
  std::vector<std::uint64_t> cps;
  for (double x : plan.x_grid) cps.push_back(position_of(x));
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, cps, plan.workers);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    const auto u = position_of(x);
    for (double q : plan.q_list) {
      out.push_back(make_record("moments", "E|M|^q", name, x, plan.N, q, moment_estimate(set, u, q, plan.master_seed)));
      if (rmf && q >= 1.0 && q <= 2.0 && x >= std::exp(std::numbers::e)) {
        out.push_back(exact_record("moments", "harper_predictor", name, x, plan.N, q, harper_predictor(x, q)));
      }
    }
    if (rmf && std::get<RmfSpec>(plan.process).oracle == OracleKind::pseudorandom) {
      out.push_back(exact_record("moments", "Q(x)", name, x, plan.N, 2.0,
                                 static_cast<double>(squarefree_count(u))));
      out.push_back(make_record("moments", "E|M|/sqrt(E M^2)", name, x, plan.N, 1.0,
                                moment_ratio_estimate(set, u, 1.0, 2.0, 0.5, plan.master_seed)));
    }
  }
  return out;
}

std::vector<ResultRecord> cmd_lambda(const Context& c) {
  const auto& s = c.settings;
  const int N = s.integer("N");
  const auto qs = s.reals("q");
  std::vector<ResultRecord> out;
  auto emit = [&](double x_field, const LambdaParams& p) {
    const double exact = lambda_exact(p);
    out.push_back(exact_record("lambda", "exact", "rmf", x_field, p.N, p.q, exact));
    if (p.q <= 1.9 && p.log_log_x > 0.0) {
      const double asym = lambda_asymptotic(p);
      out.push_back(exact_record("lambda", "asymptotic", "rmf", x_field, p.N, p.q, asym));
      out.push_back(exact_record("lambda", "exact/asymptotic", "rmf", x_field, p.N, p.q, exact / asym));
    }
  };
  if (s.has("loglog")) {
    if (s.has("x") || s.has("x-range") || s.has("x-ell")) throw ParameterError("give either --loglog or an x grid");
    for (double ll : s.reals("loglog")) {
      // exp(exp(loglog)) overflows quickly; x is then left undefined and the
      // loglog value gets a record of its own.
      const double x = std::exp(std::exp(ll));
      const double x_field = std::isfinite(x) ? x : std::nan("");
      for (double q : qs) {
        out.push_back(exact_record("lambda", "loglog x", "rmf", x_field, N, q, ll));
        emit(x_field, LambdaParams::from_log_log(N, ll, q));
      }
    }
  } else {
    for (double x : x_grid(s)) {
      for (double q : qs) emit(x, LambdaParams::from_x(N, x, q));
    }
  }
  return out;
}

std::vector<ResultRecord> cmd_correlations(const Context& c) {
  const auto plan = c.plan();
  if (plan.N < 2) throw ParameterError("correlations: need N >= 2");
  const auto name = process_name(plan.process);
  const bool rmf = std::holds_alternative<RmfSpec>(plan.process);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    if (!(x >= 1.0)) throw ParameterError("correlations: x must be >= 1");
    const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, grid_positions(x, plan.N),
                                   plan.workers);
    for (int n = 1; n <= plan.N; ++n) {
      for (int m = n + 1; m <= plan.N; ++m) {
        const auto tag = "rho_" + std::to_string(n) + "_" + std::to_string(m);
        out.push_back(make_record("correlations", tag, name, x, plan.N, 0.0,
                                  correlation_estimate(set, x, n, m, plan.master_seed)));
        if (rmf) {
          out.push_back(exact_record("correlations", tag + "_exact", name, x, plan.N, 0.0,
                                     exact_or_nan([&] { return exact_correlation(x, n, m); })));
        }
      }
    }
  }
  return out;
}

std::vector<ResultRecord> cmd_events(const Context& c) {
  const auto plan = c.plan();
  const auto name = process_name(plan.process);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    const auto e = estimate_event_probs(plan, x, plan.N, plan.epsilon, plan.delta);
    out.push_back(make_record("events", "P(A)", name, x, plan.N, 1.0, e.p_a));
    out.push_back(make_record("events", "P(B)", name, x, plan.N, 1.0, e.p_b));
    out.push_back(make_record("events", "P(change|A,B)", name, x, plan.N, 1.0, e.p_change_given_ab));
    out.push_back(exact_record("events", "count(A,B)", name, x, plan.N, 1.0, static_cast<double>(e.n_ab)));
    out.push_back(exact_record("events", "count(A,B,forced)", name, x, plan.N, 1.0, static_cast<double>(e.n_forced)));
    out.push_back(exact_record("events", "implication_holds", name, x, plan.N, 1.0, e.implication_holds ? 1.0 : 0.0));
    if (!e.implication_holds) c.warn("A and B with forcing geometry but no sign change at x = " + std::to_string(x));
  }
  return out;
}

std::vector<ResultRecord> cmd_signprob(const Context& c) {
  const auto plan = c.plan();
  const auto name = process_name(plan.process);
  std::vector<std::uint64_t> cps;
  for (double x : plan.x_grid) {
    cps.push_back(position_of(x));
    cps.push_back(position_of(std::exp(static_cast<double>(plan.N)) * x));
  }
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, cps, plan.workers);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    const auto flags = regime_flags(x, plan.N);
    if (!flags.n_small || !flags.loglog_small) {
      c.warn("x = " + std::to_string(x) + ", N = " + std::to_string(plan.N) + " is outside the asymptotic regime");
    }
    const auto a = position_of(x);
    const auto b = position_of(std::exp(static_cast<double>(plan.N)) * x);
    out.push_back(make_record("signprob", "P(change in (x, e^N x])", name, x, plan.N, 0.0,
                              sign_change_prob_estimate(set, a, b, plan.master_seed)));
  }
  return out;
}

std::vector<ResultRecord> cmd_avg_v(const Context& c) {
  const auto plan = c.plan();
  const auto name = process_name(plan.process);
  std::vector<std::uint64_t> cps;
  for (double x : plan.x_grid) cps.push_back(position_of(x));
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, cps, plan.workers);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    const auto e = expected_v_estimate(set, position_of(x), plan.master_seed);
    out.push_back(make_record("avg-v", "E V", name, x, plan.N, 0.0, e));
    if (x > std::exp(1.0)) {
      const double g = std::log(x) / std::pow(std::log(std::log(x)), 0.51);
      auto r = e;
      r.point /= g;
      r.ci_lo /= g;
      r.ci_hi /= g;
      out.push_back(make_record("avg-v", "E V (log log x)^0.51 / log x", name, x, plan.N, 0.0, r));
    }
  }
  return out;
}

std::vector<ResultRecord> cmd_mertens(const Context& c) {
  std::vector<ResultRecord> out;
  for (double x : x_grid(c.settings)) {
    const auto u = position_of(x);
    require_budget(u, 1, "mertens");
    const auto trace = mertens_trace(u);
    out.push_back(exact_record("mertens", "M(x)", "mobius", x, 0, 0.0, trace.final_value));
    out.push_back(exact_record("mertens", "V(x)", "mobius", x, 0, 0.0, static_cast<double>(trace.sign_change_count)));
  }
  return out;
}

std::vector<ResultRecord> cmd_models(const Context& c) {
  const auto plan = c.plan();
  const auto name = process_name(plan.process);
  std::vector<std::uint64_t> cps;
  for (double x : plan.x_grid) cps.push_back(position_of(x));
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, cps, plan.workers);
  std::vector<ResultRecord> out;
  for (double x : plan.x_grid) {
    const auto u = position_of(x);
    out.push_back(make_record("models", "E M^2", name, x, plan.N, 2.0, moment_estimate(set, u, 2.0, plan.master_seed)));
    if (const auto* spec = std::get_if<ModelSpec>(&plan.process)) {
      CompensatedSum lo, hi;
      for (std::uint64_t n = 1; n <= u; ++n) {
        const auto b = variance_bounds(*spec, n);
        lo += b.lo;
        hi += b.hi;
      }
      out.push_back(exact_record("models", "sum E X_n^2 lower", name, x, plan.N, 2.0, lo.value()));
      out.push_back(exact_record("models", "sum E X_n^2 upper", name, x, plan.N, 2.0, hi.value()));
    } else {
      out.push_back(exact_record("models", "Q(x)", name, x, plan.N, 2.0, static_cast<double>(squarefree_count(u))));
    }
    out.push_back(make_record("models", "E|M|/sqrt(E M^2)", name, x, plan.N, 1.0,
                              moment_ratio_estimate(set, u, 1.0, 2.0, 0.5, plan.master_seed)));
    out.push_back(make_record("models", "E M^4/(E M^2)^2", name, x, plan.N, 4.0,
                              moment_ratio_estimate(set, u, 4.0, 2.0, 2.0, plan.master_seed)));
    out.push_back(make_record("models", "E V", name, x, plan.N, 0.0, expected_v_estimate(set, u, plan.master_seed)));
    out.push_back(exact_record("models", "psi", name, x, plan.N, 0.0, psi_predictor(plan.process, x)));
    if (x > 1.0 && plan.N <= std::log(x) / 10.0) {
      const auto report = psi_stability_check(plan.process, x, plan.N);
      out.push_back(exact_record("models", "psi_scaled_deviation", name, x, plan.N, 0.0, report.max_scaled_deviation));
      out.push_back(exact_record("models", "psi_stable", name, x, plan.N, 0.0, report.bounded ? 1.0 : 0.0));
    }
  }
  return out;
}

int cmd_selftest(const Context& c, std::ostream& out) {
  AcceptanceOptions options;
  options.seed = c.seed;
  options.workers = static_cast<unsigned>(c.settings.integer("workers"));
  if (c.settings.has("only")) {
    for (double v : c.settings.reals("only")) options.only.push_back(static_cast<int>(v));
  }
  int failures = 0;
  run_acceptance(options, [&](const CriterionResult& r) {
    out << format_result(r) << std::endl;
    failures += r.pass ? 0 : 1;
  });
  out << (failures == 0 ? "selftest: all criteria passed" : "selftest: " + std::to_string(failures) + " failed")
      << '\n';
  return failures == 0 ? kExitOk : kExitFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rmflab: sign changes of random multiplicative functions, simulated", "rmflab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const auto& key : kKeys) {
    flag_options[key.name] = app.add_option(std::string("--") + key.name, flag_values[key.name], key.help);
  }
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value file; flags take precedence");

  static const std::pair<const char*, const char*> kCommands[] = {
      {"simulate", "moments and E V on an x grid"},
      {"moments", "E|M(x)|^q with the Harper predictor"},
      {"lambda", "exact and asymptotic Lambda(N, x, q)"},
      {"correlations", "empirical and exact correlations of Y_n, Y_m"},
      {"events", "probabilities of the events A, B and the forced sign change"},
      {"signprob", "probability of a sign change in (x, e^N x]"},
      {"avg-v", "E V(x), by default on the x_l grid"},
      {"mertens", "sign-change census of the Mertens function"},
      {"models", "orthogonal-sequence model diagnostics"},
      {"selftest", "run the acceptance suite"},
  };
  for (const auto& [name, help] : kCommands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rmflab: error[parameter]: " << e.what() << '\n';
    return kExitParameter;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::map<std::string, std::string> merged;
    for (const auto& key : kKeys) {
      if (key.fallback) merged[key.name] = key.fallback;
    }
    if (!config_path.empty()) {
      for (auto& [k, v] : read_config(config_path)) merged[k] = v;
    }
    for (const auto& key : kKeys) {
      if (flag_options[key.name]->count() > 0) merged[key.name] = flag_values[key.name];
    }
    const std::string command = app.get_subcommands().front()->get_name();
    Settings settings(std::move(merged));

    Context ctx{settings, command, 0, "", err};
    if (settings.has("seed")) {
      ctx.seed = settings.count("seed");
      ctx.seed_source = "given";
    } else if (command == "selftest") {
      throw ParameterError("selftest requires --seed");
    } else if (command == "lambda" || command == "mertens") {
      ctx.seed_source = "unused";
    } else {
      std::random_device rd;
      ctx.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      ctx.seed_source = "entropy";
      ctx.settings.set("seed", std::to_string(ctx.seed));
      err << "rmflab: warning: no --seed given; using " << ctx.seed << " (recorded in the manifest)\n";
    }
    if (settings.has("only") && command != "selftest") throw ParameterError("--only applies to selftest");

    if (command == "selftest") return cmd_selftest(ctx, out);

    std::vector<ResultRecord> records;
    if (command == "simulate") records = cmd_simulate(ctx);
    else if (command == "moments") records = cmd_moments(ctx);
    else if (command == "lambda") records = cmd_lambda(ctx);
    else if (command == "correlations") records = cmd_correlations(ctx);
    else if (command == "events") records = cmd_events(ctx);
    else if (command == "signprob") records = cmd_signprob(ctx);
    else if (command == "avg-v") {
      if (!settings.has("x") && !settings.has("x-range") && !settings.has("x-ell")) ctx.settings.set("x-ell", "0.01:12");
      records = cmd_avg_v(ctx);
    } else if (command == "mertens") records = cmd_mertens(ctx);
    else records = cmd_models(ctx);

    const auto format = parse_format(ctx.settings.str("format"));
    RunManifest manifest;
    manifest.command = command;
    for (const auto& [k, v] : ctx.settings.all()) manifest.plan.emplace_back(k, v);
    manifest.plan.emplace_back("budget", std::to_string(step_budget()));
    std::sort(manifest.plan.begin(), manifest.plan.end());
    manifest.seed_source = ctx.seed_source;
    manifest.master_seed = ctx.seed;
    manifest.seeds.emplace_back(command, ctx.seed);
    manifest.notes.assign(std::begin(kNotes), std::end(kNotes));
    manifest.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (ctx.settings.has("out")) {
      export_records(ctx.settings.str("out"), format, records, manifest);
      out << "wrote " << records.size() << " records to " << ctx.settings.str("out") << '\n';
    } else if (format == RecordFormat::csv) {
      write_csv(out, records);
    } else {
      write_jsonl(out, records, "", manifest.run_id());
    }
    return kExitOk;
  } catch (const ParameterError& e) {
    err << "rmflab: error[parameter]: " << e.what() << '\n';
    return kExitParameter;
  } catch (const ResourceError& e) {
    err << "rmflab: error[resource]: " << e.what();
    if (e.required() > 0) err << " (required " << e.required() << " steps)";
    err << '\n';
    return kExitResource;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(argc, argv, out, err);
  } catch (const std::exception& e) {
    err << "rmflab: error[internal]: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace rmflab
