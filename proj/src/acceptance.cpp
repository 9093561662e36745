#include "rmflab/acceptance.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rmflab/analysis.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/oracle.hpp"
#include "rmflab/pilot.hpp"
#include "rmflab/rmf.hpp"
#include "rmflab/sieve.hpp"
#include "rmflab/summation.hpp"

namespace rmflab {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t criterion_seed(std::uint64_t seed, int id) {
  return mix64(seed + static_cast<std::uint64_t>(id) * kGoldenGamma);
}

ModelSpec model_of(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  return spec;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g4(double v) { return fmt("%.4g", v); }

std::string ci(const EstimateWithCI& e) {
  return g4(e.point) + " [" + g4(e.ci_lo) + ", " + g4(e.ci_hi) + "]";
}

bool within_se(const EstimateWithCI& e, double exact, double k) {
  return std::fabs(e.point - exact) <= k * e.standard_error;
}

std::vector<std::uint64_t> positions(std::initializer_list<double> xs) {
  std::vector<std::uint64_t> out;
  for (double x : xs) out.push_back(position_of(x));
  return out;
}

CriterionResult start(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

long peak_rss_kib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

// --- criteria -------------------------------------------------------------

CriterionResult second_moment(const AcceptanceOptions& o) {
  auto r = start(1, "exact second moment E M(x)^2 = Q(x)");
  const auto seed = criterion_seed(o.seed, 1);
  const auto set = sample_traces(RmfSpec{}, seed, 2000, positions({1e3, 1e4, 1e5}), o.workers);
  r.pass = true;
  std::ostringstream d;
  for (double x : {1e3, 1e4, 1e5}) {
    const auto u = position_of(x);
    const auto e = moment_estimate(set, u, 2.0, seed);
    const double q = static_cast<double>(squarefree_count(u));
    const bool ok = within_se(e, q, 4.0);
    r.pass = r.pass && ok;
    d << "x=" << g4(x) << " est " << ci(e) << " Q=" << q << " z=" << g4((e.point - q) / e.standard_error)
      << (ok ? "" : " (outside 4 SE)") << "; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult correlation_decay(const AcceptanceOptions& o) {
  auto r = start(2, "correlation decay of Y_n, x = 1e3");
  const auto seed = criterion_seed(o.seed, 2);
  const double x = 1e3;
  const auto set = sample_traces(RmfSpec{}, seed, 2000, grid_positions(x, 6), o.workers);
  r.pass = true;
  double worst_z = 0.0, worst_decay = 0.0;
  std::ostringstream bad;
  for (int n = 1; n <= 6; ++n) {
    for (int m = n + 1; m <= 6; ++m) {
      const auto e = correlation_estimate(set, x, n, m, seed);
      const double exact = exact_correlation(x, n, m);
      const double z = std::fabs(e.point - exact) / e.standard_error;
      const double decay = std::fabs(exact) * std::exp(0.5 * (m - n));
      worst_z = std::max(worst_z, z);
      worst_decay = std::max(worst_decay, decay);
      if (!(z <= 4.0) || !(decay <= 2.0)) {
        r.pass = false;
        bad << " (" << n << "," << m << "): est " << ci(e) << " exact " << g4(exact);
      }
    }
  }
  r.detail = "15 pairs; max |est-exact|/SE " + g4(worst_z) + " (limit 4), max |rho| e^((m-n)/2) " +
             g4(worst_decay) + " (limit 2)" + bad.str();
  return r;
}

CriterionResult lambda_asymptotics(const AcceptanceOptions&) {
  auto r = start(3, "Lambda(N,x,q) asymptotics, N = 1e4");
  r.pass = true;
  std::ostringstream d;
  for (double ll : {100.0, 1e4}) {
    const double limit = ll == 100.0 ? 0.25 : 0.05;
    for (double q : {1.0, 1.5}) {
      const auto p = LambdaParams::from_log_log(10'000, ll, q);
      const double exact = lambda_exact(p);
      const double rel = std::fabs(exact - lambda_asymptotic(p)) / exact;
      const bool ok = rel <= limit;
      r.pass = r.pass && ok;
      d << "loglog x=" << g4(ll) << " q=" << q << " rel err " << fmt("%.4f", rel) << " (limit "
        << limit << (ok ? ")" : ", exceeded)") << "; ";
    }
  }
  r.detail = d.str();
  return r;
}

CriterionResult brute_force(const AcceptanceOptions& o) {
  auto r = start(4, "iid Rademacher n = 16 against all 2^16 paths");
  constexpr int n = 16;
  constexpr std::uint32_t paths = 1u << n;
  double sum_abs = 0.0, sum_v = 0.0;
  std::uint32_t mismatches = 0;
  std::vector<double> values(n);
  for (std::uint32_t k = 0; k < paths; ++k) {
    int s = 0;
    int naive = 0, prev = 0;
    for (int i = 0; i < n; ++i) {
      s += ((k >> i) & 1) ? -1 : 1;
      values[i] = s;
      if (s != 0) {
        const int sign = s > 0 ? 1 : -1;
        if (prev != 0 && sign != prev) ++naive;
        prev = sign;
      }
    }
    const auto counted = count_sign_changes(values).count;
    if (counted != static_cast<std::uint64_t>(naive)) ++mismatches;
    sum_abs += std::abs(s);
    sum_v += naive;
  }
  const double exact_abs = sum_abs / paths;
  const double exact_v = sum_v / paths;

  const auto seed = criterion_seed(o.seed, 4);
  const auto set = sample_traces(model_of(ModelKind::iid_rademacher), seed, 100'000, {16}, o.workers);
  const auto ev = expected_v_estimate(set, 16, seed);
  const auto eabs = moment_estimate(set, 16, 1.0, seed);
  r.pass = mismatches == 0 && within_se(ev, exact_v, 4.0) && within_se(eabs, exact_abs, 4.0);
  r.detail = "E V(16) exact " + fmt("%.6f", exact_v) + " MC " + ci(ev) + "; E|S_16| exact " +
             fmt("%.6f", exact_abs) + " MC " + ci(eabs) + "; counter mismatches " +
             std::to_string(mismatches) + "/65536";
  return r;
}

CriterionResult erdos_hunt(const AcceptanceOptions& o) {
  auto r = start(5, "iid Rademacher E V(x) >= 0.4 log x, x = 2^10..2^20");
  const auto seed = criterion_seed(o.seed, 5);
  std::vector<std::uint64_t> xs;
  for (int k = 10; k <= 20; ++k) xs.push_back(std::uint64_t{1} << k);
  const auto set = sample_traces(model_of(ModelKind::iid_rademacher), seed, 1000, xs, o.workers);
  r.pass = true;
  double worst = 1e300;
  std::ostringstream bad;
  for (auto u : xs) {
    const auto e = expected_v_estimate(set, u, seed);
    const double bound = 0.4 * std::log(static_cast<double>(u));
    worst = std::min(worst, e.ci_lo / bound);
    if (!(e.ci_lo >= bound)) {
      r.pass = false;
      bad << " x=" << u << " " << ci(e) << " < " << g4(bound);
    }
  }
  r.detail = "min over x of (lower 95% bound)/(0.4 log x) = " + g4(worst) + bad.str();
  return r;
}

CriterionResult local_sign_change(const AcceptanceOptions& o) {
  auto r = start(6, "local sign-change probability, N = 8");
  const auto sweep = sign_prob_sweep(criterion_seed(o.seed, 6), 1000, o.workers);
  std::vector<double> points;
  bool above = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < sweep.x.size(); ++i) {
    points.push_back(sweep.p[i].point);
    above = above && sweep.p[i].point >= pilot::kSignChangeTheta;
    const auto flags = regime_flags(sweep.x[i], sweep.N);
    d << "x=" << g4(sweep.x[i]) << " P " << ci(sweep.p[i])
      << (flags.n_small ? "" : " [outside N<=log(x)/10]") << "; ";
  }
  const auto trend = spearman_decreasing_test(points);
  r.pass = above && trend.p_decreasing > 0.05;
  d << "theta " << pilot::kSignChangeTheta << (above ? "" : " (not met)") << "; Spearman rho "
    << g4(trend.rho) << " p(decreasing) " << g4(trend.p_decreasing);
  r.detail = d.str();
  return r;
}

CriterionResult averaged_v(const AcceptanceOptions& o) {
  auto r = start(7, "averaged V growth on the x_l grid");
  const auto sweep = averaged_v_sweep(criterion_seed(o.seed, 7), 1000, o.workers);
  double min_ratio = 1e300, min_lo = 1e300;
  std::ostringstream d;
  for (std::size_t i = 0; i < sweep.x.size(); ++i) {
    min_ratio = std::min(min_ratio, sweep.ratio[i].point);
    min_lo = std::min(min_lo, sweep.ratio[i].ci_lo);
    d << "x=" << g4(sweep.x[i]) << " E V " << ci(sweep.expected_v[i]) << " ratio " << ci(sweep.ratio[i])
      << "; ";
  }
  const double floor = pilot::kAveragedVKappa / 2.0;
  r.pass = min_ratio >= floor && min_lo > 0.0;
  d << "min ratio " << g4(min_ratio) << " vs pilot kappa/2 = " << g4(floor) << ", min lower bound "
    << g4(min_lo) << "; this run's floor " << g4(sweep.kappa_floor);
  r.detail = d.str();
  return r;
}

CriterionResult harper_shape(const AcceptanceOptions& o) {
  auto r = start(8, "E|M| / sqrt(E M^2) against (log log x)^(-1/4)");
  const auto seed = criterion_seed(o.seed, 8);
  const auto xs = positions({1e4, 1e5, 1e6, 1e7});
  const auto set = sample_traces(RmfSpec{}, seed, 500, xs, o.workers);
  r.pass = true;
  std::ostringstream d;
  for (auto u : xs) {
    const auto e = moment_ratio_estimate(set, u, 1.0, 2.0, 0.5, seed);
    const double pred = std::pow(std::log(std::log(static_cast<double>(u))), -0.25);
    const double factor = e.point / pred;
    const bool ok = factor >= 0.25 && factor <= 4.0;
    r.pass = r.pass && ok;
    d << "x=" << g4(static_cast<double>(u)) << " ratio " << ci(e) << " / prediction " << g4(pred) << " = "
      << g4(factor) << (ok ? "" : " (outside [1/4, 4])") << "; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult mertens(const AcceptanceOptions&) {
  auto r = start(9, "Mertens sign-change census to 1e6");
  const std::vector<std::uint64_t> cps{2, 3, 10};
  const auto trace = mertens_trace(pilot::kMertensLimit, cps);
  // Independent recount from the linear-sieve Moebius table.
  const auto mu = mobius_up_to(pilot::kMertensLimit);
  std::int64_t m = 0;
  int last = 0;
  std::uint64_t changes = 0;
  for (std::uint64_t n = 1; n <= pilot::kMertensLimit; ++n) {
    m += mu[n];
    const int s = (m > 0) - (m < 0);
    if (s != 0) {
      if (last != 0 && s != last) ++changes;
      last = s;
    }
  }
  const bool small_ok = trace.checkpoint_values[2] == -1.0 && trace.checkpoint_changes[0] == 0 &&
                        trace.checkpoint_changes[1] == 1;
  const bool pinned_ok = trace.final_value == static_cast<double>(pilot::kMertensFinal) &&
                         trace.sign_change_count == pilot::kMertensSignChanges;
  const bool recount_ok = static_cast<double>(m) == trace.final_value && changes == trace.sign_change_count;
  r.pass = small_ok && pinned_ok && recount_ok;
  std::ostringstream d;
  d << "M(1e6) " << trace.final_value << " (pinned " << pilot::kMertensFinal << "), changes "
    << trace.sign_change_count << " (pinned " << pilot::kMertensSignChanges << "), recount "
    << (recount_ok ? "agrees" : "DIFFERS") << "; M(10) " << trace.checkpoint_values[2]
    << ", first change at u=3 " << (small_ok ? "yes" : "NO");
  r.detail = d.str();
  return r;
}

/// Two runs of the same sampling job at different worker counts.
bool same_traces(const ProcessSpec& process, std::uint64_t seed, std::uint64_t samples,
                 std::vector<std::uint64_t> cps, unsigned workers) {
  const auto a = sample_traces(process, seed, samples, cps, 1);
  const auto b = sample_traces(process, seed, samples, cps, std::max(2u, workers + 1));
  return a == b;
}

CriterionResult performance(const AcceptanceOptions& o) {
  auto r = start(10, "performance, memory, reproducibility");
  const auto t0 = Clock::now();
  const auto trace = rmf_trace(SignOracle::pseudorandom(criterion_seed(o.seed, 10), 0), 100'000'000);
  const double trace_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  // Reduced sample counts crossing a 64-lane block boundary; the traces
  // depend only on (seed, sample index), so agreement on these covers the
  // full runs of the other criteria.
  struct Job {
    const char* name;
    ProcessSpec process;
    std::uint64_t samples;
    std::vector<std::uint64_t> cps;
  };
  const double big = std::exp(8.0) * 1e5;
  std::vector<Job> jobs{
      {"C1", RmfSpec{}, 130, positions({1e3, 1e4, 1e5})},
      {"C2", RmfSpec{}, 130, grid_positions(1e3, 6)},
      {"C6", RmfSpec{}, 65, positions({1e3, 1e4, 1e5, std::exp(8.0) * 1e3, std::exp(8.0) * 1e4, big})},
      {"C7", RmfSpec{}, 130, positions({3224.0, 691187.0})},
      {"C8", RmfSpec{}, 130, positions({1e4, 1e7})},
      {"C4", model_of(ModelKind::iid_rademacher), 1000, {16}},
      {"C5", model_of(ModelKind::iid_rademacher), 130, {1024, 1u << 20}},
      {"C11", model_of(ModelKind::sidon_cosine), 300, {100, 1000}},
      {"C12", model_of(ModelKind::harmonic_rademacher), 130, {256, 1u << 22}},
      {"martingale", model_of(ModelKind::bounded_martingale), 130, {1000}},
  };
  std::string failed;
  for (const auto& job : jobs) {
    if (!same_traces(job.process, criterion_seed(o.seed, 10), job.samples, job.cps, o.workers)) {
      failed += std::string(" ") + job.name;
    }
  }
  const double rss_mib = static_cast<double>(peak_rss_kib()) / 1024.0;
  r.pass = trace_seconds < 60.0 && rss_mib < 1024.0 && failed.empty() && trace.x_end == 100'000'000;
  std::ostringstream d;
  d << "rmf trace to 1e8 in " << fmt("%.2f", trace_seconds) << " s (limit 60), peak RSS "
    << fmt("%.0f", rss_mib) << " MiB (limit 1024), reproducibility across worker counts "
    << (failed.empty() ? "identical on all " + std::to_string(jobs.size()) + " jobs" : "DIFFERS:" + failed);
  r.detail = d.str();
  return r;
}

CriterionResult sidon(const AcceptanceOptions& o) {
  auto r = start(11, "Sidon cosine model moments");
  const auto seed = criterion_seed(o.seed, 11);
  const auto set = sample_traces(model_of(ModelKind::sidon_cosine), seed, 10'000, {100, 1000}, o.workers);
  r.pass = true;
  std::ostringstream d;
  for (std::uint64_t u : {100u, 1000u}) {
    const auto kurt = moment_ratio_estimate(set, u, 4.0, 2.0, 2.0, seed);
    const auto l1 = moment_ratio_estimate(set, u, 1.0, 2.0, 0.5, seed);
    const bool ok = kurt.point >= 1.0 && kurt.point <= 10.0 && l1.point >= 0.3;
    r.pass = r.pass && ok;
    d << "x=" << u << " E M^4/(E M^2)^2 " << ci(kurt) << ", E|M|/sqrt(E M^2) " << ci(l1)
      << (ok ? "" : " (out of range)") << "; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult harmonic(const AcceptanceOptions& o) {
  auto r = start(12, "harmonic model E V(x) growth, x = 2^8..2^22");
  const auto seed = criterion_seed(o.seed, 12);
  std::vector<std::uint64_t> xs;
  for (int k = 8; k <= 22; ++k) xs.push_back(std::uint64_t{1} << k);
  const auto set = sample_traces(model_of(ModelKind::harmonic_rademacher), seed, 1000, xs, o.workers);
  std::vector<std::vector<double>> v;
  std::vector<double> loglog, logx, mean_v;
  for (auto u : xs) {
    v.push_back(set.changes_up_to(u));
    logx.push_back(std::log(static_cast<double>(u)));
    loglog.push_back(std::log(logx.back()));
    mean_v.push_back(compensated_mean(v.back()));
  }
  const auto fit_ll = fit_line(loglog, mean_v);
  const auto fit_l = fit_line(logx, mean_v);
  const auto slope = bootstrap(
      set.traces.size(),
      [&](std::span<const std::size_t> idx) {
        std::vector<double> means;
        for (const auto& col : v) means.push_back(indexed_mean(col, idx));
        return fit_line(loglog, means).slope;
      },
      seed, stream_tag("harmonic_slope"));
  const bool slope_ok = slope.ci_lo > 0.0;
  const bool worse_ok = fit_l.ssr > fit_ll.ssr;
  r.pass = slope_ok && worse_ok;
  std::ostringstream d;
  d << "slope vs log log x " << ci(slope) << (slope_ok ? "" : " (not positive)") << "; SSR vs log log x "
    << g4(fit_ll.ssr) << ", SSR vs log x " << g4(fit_l.ssr)
    << (worse_ok ? " (log x fits worse)" : " (log x fits better: not met)") << "; E V(2^8) "
    << g4(mean_v.front()) << ", E V(2^22) " << g4(mean_v.back());
  r.detail = d.str();
  return r;
}

}  // namespace

SignProbSweep sign_prob_sweep(std::uint64_t seed, std::uint64_t samples, unsigned workers) {
  SignProbSweep sweep;
  std::vector<std::uint64_t> cps;
  for (double x : sweep.x) {
    cps.push_back(position_of(x));
    cps.push_back(position_of(std::exp(static_cast<double>(sweep.N)) * x));
  }
  const auto set = sample_traces(RmfSpec{}, seed, samples, cps, workers);
  for (double x : sweep.x) {
    sweep.p.push_back(sign_change_prob_estimate(
        set, position_of(x), position_of(std::exp(static_cast<double>(sweep.N)) * x), seed));
  }
  return sweep;
}

AveragedVSweep averaged_v_sweep(std::uint64_t seed, std::uint64_t samples, unsigned workers) {
  AveragedVSweep sweep;
  for (double x : x_ell_grid(0.01, 40)) {
    if (x >= 1e3 && x <= 1e6) sweep.x.push_back(x);
  }
  std::vector<std::uint64_t> cps;
  for (double x : sweep.x) cps.push_back(position_of(x));
  const auto set = sample_traces(RmfSpec{}, seed, samples, cps, workers);
  for (double x : sweep.x) {
    const auto e = expected_v_estimate(set, position_of(x), seed);
    const double g = std::log(x) / std::pow(std::log(std::log(x)), 0.51);
    auto ratio = e;
    ratio.point /= g;
    ratio.ci_lo /= g;
    ratio.ci_hi /= g;
    ratio.standard_error /= g;
    sweep.expected_v.push_back(e);
    sweep.ratio.push_back(ratio);
  }
  sweep.kappa_floor = sweep.ratio.front().point;
  for (const auto& r : sweep.ratio) sweep.kappa_floor = std::min(sweep.kappa_floor, r.point);
  return sweep;
}

std::string format_result(const CriterionResult& result) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] C%d ", result.pass ? "PASS" : "FAIL", result.id);
  return std::string(head) + result.title + " (" + fmt("%.1f", result.seconds) + "s): " + result.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  using Criterion = CriterionResult (*)(const AcceptanceOptions&);
  static constexpr Criterion kCriteria[kCriterionCount] = {
      second_moment, correlation_decay, lambda_asymptotics, brute_force, erdos_hunt, local_sign_change,
      averaged_v,    harper_shape,      mertens,            performance, sidon,      harmonic};
  for (int id : options.only) {
    if (id < 1 || id > kCriterionCount) throw ParameterError("acceptance: no criterion " + std::to_string(id));
  }
  std::vector<CriterionResult> results;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto t0 = Clock::now();
    CriterionResult result;
    try {
      result = kCriteria[id - 1](options);
    } catch (const std::exception& e) {
      result.id = id;
      result.title = "criterion " + std::to_string(id);
      result.pass = false;
      result.detail = std::string("error: ") + e.what();
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (on_result) on_result(result);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace rmflab
