#include "rmflab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

#include "rmflab/budget.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/rmf.hpp"

namespace rmflab {
namespace {

/// Runs fn(begin, end) over [0, units) split into contiguous worker ranges.
template <class Fn>
void parallel_ranges(std::uint64_t units, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(units, 1)));
  if (workers == 1) {
    fn(std::uint64_t{0}, units);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    const auto begin = units * w / workers;
    const auto end = units * (w + 1) / workers;
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> indicator(const std::vector<bool>& flags) {
  std::vector<double> out(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) out[i] = flags[i] ? 1.0 : 0.0;
  return out;
}

EstimateWithCI exact_estimate(double value, std::uint64_t n, std::uint64_t seed) {
  EstimateWithCI e;
  e.point = e.ci_lo = e.ci_hi = value;
  e.standard_error = 0.0;
  e.n_samples = n;
  e.seed = seed;
  return e;
}

}  // namespace

RegimeFlags regime_flags(double x, int N) {
  RegimeFlags flags;
  if (x > 1.0) flags.n_small = static_cast<double>(N) <= std::log(x) / 10.0;
  if (x > std::numbers::e) {
    flags.loglog_small = std::log(std::log(x)) <= std::pow(static_cast<double>(N), 2.0 - kRegimeEpsilon);
  } else {
    flags.loglog_small = true;
  }
  return flags;
}

void ExperimentPlan::validate() const {
  if (samples < 1) throw ParameterError("plan: samples must be >= 1");
  if (workers < 1) throw ParameterError("plan: workers must be >= 1");
  if (N < 1) throw ParameterError("plan: N must be >= 1");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] >= 1.0)) throw ParameterError("plan: x values must be >= 1");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) throw ParameterError("plan: x grid must be ascending");
  }
  if (!(epsilon > 0.0)) throw ParameterError("plan: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("plan: delta must lie in (0, 1)");
}

std::size_t TraceSet::checkpoint_index(std::uint64_t u) const {
  const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), u);
  if (it == checkpoints.end() || *it != u) {
    throw ParameterError("TraceSet: no checkpoint at " + std::to_string(u));
  }
  return static_cast<std::size_t>(it - checkpoints.begin());
}

std::vector<double> TraceSet::values_at(std::uint64_t u) const {
  const auto k = checkpoint_index(u);
  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(t.checkpoint_values[k]);
  return out;
}

std::vector<double> TraceSet::changes_between(std::uint64_t a, std::uint64_t b) const {
  const auto ka = checkpoint_index(a);
  const auto kb = checkpoint_index(b);
  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(static_cast<double>(t.changes_between(ka, kb)));
  return out;
}

std::vector<double> TraceSet::changes_up_to(std::uint64_t u) const {
  const auto k = checkpoint_index(u);
  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(static_cast<double>(t.checkpoint_changes[k]));
  return out;
}

std::uint64_t position_of(double x) {
  if (!(x >= 1.0) || !(x < 1.8e19)) throw ParameterError("position: x must lie in [1, 2^64)");
  return static_cast<std::uint64_t>(std::floor(x));
}

TraceSet sample_traces(const ProcessSpec& process, std::uint64_t seed, std::uint64_t samples,
                       std::vector<std::uint64_t> checkpoints, unsigned workers) {
  if (samples < 1) throw ParameterError("sample_traces: samples must be >= 1");
  if (checkpoints.empty()) throw ParameterError("sample_traces: no checkpoints");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.front() < 1) throw ParameterError("sample_traces: checkpoints must be >= 1");
  const auto x_end = checkpoints.back();
  require_budget(x_end, samples, "sample_traces");

  TraceSet set;
  set.checkpoints = std::move(checkpoints);
  set.traces.resize(static_cast<std::size_t>(samples));

  if (const auto* rmf = std::get_if<RmfSpec>(&process)) {
    const auto blocks = (samples + kLanes - 1) / kLanes;
    parallel_ranges(blocks, workers, [&](std::uint64_t b0, std::uint64_t b1) {
      const auto first = b0 * kLanes;
      const auto last = std::min(samples, b1 * kLanes);
      if (first >= last) return;
      auto traces = rmf_trace_samples(rmf->oracle, seed, first, last - first, x_end, set.checkpoints);
      std::move(traces.begin(), traces.end(), set.traces.begin() + static_cast<std::ptrdiff_t>(first));
    });
  } else {
    const ModelContext context(std::get<ModelSpec>(process), x_end);
    parallel_ranges(samples, workers, [&](std::uint64_t s0, std::uint64_t s1) {
      for (auto s = s0; s < s1; ++s) {
        set.traces[static_cast<std::size_t>(s)] = sample_path(context, x_end, seed, s, set.checkpoints);
      }
    });
  }
  return set;
}

EstimateWithCI moment_estimate(const TraceSet& set, std::uint64_t u, double q, std::uint64_t seed) {
  const auto n = static_cast<std::uint64_t>(set.traces.size());
  if (q == 0.0) return exact_estimate(1.0, n, seed);
  auto values = set.values_at(u);
  for (auto& v : values) v = std::pow(std::fabs(v), q);
  return bootstrap_mean(values, seed, stream_tag("moment", {static_cast<double>(u), q}));
}

EstimateWithCI expected_v_estimate(const TraceSet& set, std::uint64_t u, std::uint64_t seed) {
  const auto values = set.changes_up_to(u);
  return bootstrap_mean(values, seed, stream_tag("expected_v", {static_cast<double>(u)}));
}

EstimateWithCI sign_change_prob_estimate(const TraceSet& set, std::uint64_t a, std::uint64_t b,
                                         std::uint64_t seed) {
  if (b <= a) return exact_estimate(0.0, set.traces.size(), seed);
  auto counts = set.changes_between(a, b);
  for (auto& c : counts) c = c >= 1.0 ? 1.0 : 0.0;
  return bootstrap_mean(counts, seed,
                        stream_tag("sign_change_prob", {static_cast<double>(a), static_cast<double>(b)}));
}

EstimateWithCI correlation_estimate(const TraceSet& set, double x, int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ParameterError("correlation: n, m must be >= 1");
  if (n == m) return exact_estimate(1.0, set.traces.size(), seed);
  const auto positions = grid_positions(x, std::max(n, m));
  auto yn = set.values_at(positions[static_cast<std::size_t>(n - 1)]);
  auto ym = set.values_at(positions[static_cast<std::size_t>(m - 1)]);
  const double sn = std::sqrt(std::exp(static_cast<double>(n)) * x);
  const double sm = std::sqrt(std::exp(static_cast<double>(m)) * x);
  for (auto& v : yn) v /= sn;
  for (auto& v : ym) v /= sm;
  return bootstrap(
      yn.size(), [&](std::span<const std::size_t> idx) { return indexed_pearson(yn, ym, idx); }, seed,
      stream_tag("correlation", {x, static_cast<double>(n), static_cast<double>(m)}));
}

EstimateWithCI moment_ratio_estimate(const TraceSet& set, std::uint64_t u, double a, double b,
                                     double power, std::uint64_t seed) {
  const auto values = set.values_at(u);
  std::vector<double> pa(values.size()), pb(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    pa[i] = std::pow(std::fabs(values[i]), a);
    pb[i] = std::pow(std::fabs(values[i]), b);
  }
  return bootstrap(
      values.size(),
      [&](std::span<const std::size_t> idx) {
        return indexed_mean(pa, idx) / std::pow(indexed_mean(pb, idx), power);
      },
      seed, stream_tag("moment_ratio", {static_cast<double>(u), a, b, power}));
}

EventProbabilities event_estimate(const TraceSet& set, double x, int N, double epsilon,
                                  double delta, std::uint64_t seed) {
  const auto positions = grid_positions(x, N);
  std::vector<std::size_t> index;
  for (auto u : positions) index.push_back(set.checkpoint_index(u));

  const auto samples = set.traces.size();
  std::vector<bool> a(samples), b(samples), change(samples);
  EventProbabilities out;
  std::vector<double> m_values(static_cast<std::size_t>(N));
  for (std::size_t s = 0; s < samples; ++s) {
    for (int n = 0; n < N; ++n) m_values[n] = set.traces[s].checkpoint_values[index[n]];
    const auto outcome = event_indicators(grid_from_values(x, N, m_values), epsilon, delta);
    a[s] = outcome.a;
    b[s] = outcome.b;
    change[s] = outcome.sign_change;
    if (outcome.a && outcome.b) {
      ++out.n_ab;
      if (outcome.geometry_forces_change) {
        ++out.n_forced;
        out.implication_holds = out.implication_holds && outcome.sign_change;
      }
    }
  }
  const auto tag = [&](const char* name) {
    return stream_tag(name, {x, static_cast<double>(N), epsilon, delta});
  };
  out.p_a = bootstrap_mean(indicator(a), seed, tag("event_a"));
  out.p_b = bootstrap_mean(indicator(b), seed, tag("event_b"));

  if (N == 1) {
    out.p_change_given_ab = EstimateWithCI{};
    out.p_change_given_ab.n_samples = out.n_ab;
    out.p_change_given_ab.seed = seed;
  } else {
    // Conditional frequency: ratio of means, resampled over all samples.
    const auto ab = [&] {
      std::vector<double> v(samples);
      for (std::size_t s = 0; s < samples; ++s) v[s] = (a[s] && b[s]) ? 1.0 : 0.0;
      return v;
    }();
    std::vector<double> ab_change(samples);
    for (std::size_t s = 0; s < samples; ++s) ab_change[s] = ab[s] * (change[s] ? 1.0 : 0.0);
    out.p_change_given_ab = bootstrap(
        samples,
        [&](std::span<const std::size_t> idx) {
          const double den = indexed_mean(ab, idx);
          return den > 0.0 ? indexed_mean(ab_change, idx) / den : std::nan("");
        },
        seed, tag("event_change_given_ab"));
    out.p_change_given_ab.n_samples = out.n_ab;
  }
  return out;
}

EstimateWithCI estimate_moment(const ExperimentPlan& plan, double x, double q) {
  plan.validate();
  const auto u = position_of(x);
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, {u}, plan.workers);
  return moment_estimate(set, u, q, plan.master_seed);
}

EstimateWithCI estimate_sign_change_prob(const ExperimentPlan& plan, double x, int N) {
  plan.validate();
  const auto a = position_of(x);
  const auto b = position_of(std::exp(static_cast<double>(N)) * x);
  if (b <= a) return exact_estimate(0.0, plan.samples, plan.master_seed);
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, {a, b}, plan.workers);
  return sign_change_prob_estimate(set, a, b, plan.master_seed);
}

EstimateWithCI estimate_expected_V(const ExperimentPlan& plan, double x) {
  plan.validate();
  const auto u = position_of(x);
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, {u}, plan.workers);
  return expected_v_estimate(set, u, plan.master_seed);
}

EventProbabilities estimate_event_probs(const ExperimentPlan& plan, double x, int N,
                                        double epsilon, double delta) {
  plan.validate();
  if (!(x >= 1.0) || N < 1) throw ParameterError("events: need x >= 1 and N >= 1");
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples, grid_positions(x, N),
                                 plan.workers);
  return event_estimate(set, x, N, epsilon, delta, plan.master_seed);
}

EstimateWithCI estimate_correlation(const ExperimentPlan& plan, double x, int n, int m) {
  plan.validate();
  if (n < 1 || m < 1) throw ParameterError("correlation: n, m must be >= 1");
  if (n == m) return exact_estimate(1.0, plan.samples, plan.master_seed);
  const auto set = sample_traces(plan.process, plan.master_seed, plan.samples,
                                 grid_positions(x, std::max(n, m)), plan.workers);
  return correlation_estimate(set, x, n, m, plan.master_seed);
}

std::vector<double> x_ell_grid(double epsilon, int ell_max) {
  if (!(epsilon > 0.0 && epsilon <= 0.01)) throw ParameterError("x_ell_grid: epsilon must lie in (0, 0.01]");
  if (ell_max < 2) throw ParameterError("x_ell_grid: ell_max must be >= 2");
  std::vector<double> grid;
  for (int ell = 2; ell <= ell_max; ++ell) {
    const double l = ell;
    grid.push_back(std::exp(l * std::pow(std::log(l), 0.5 + epsilon)));
  }
  return grid;
}

}  // namespace rmflab
