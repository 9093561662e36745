#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rmflab/analysis.hpp"
#include "rmflab/models.hpp"
#include "rmflab/stats.hpp"
#include "rmflab/trace.hpp"

namespace rmflab {

/// Exponent slack in the log log x <= N^(2 - eps) regime proxy.
inline constexpr double kRegimeEpsilon = 5e-4;

struct RegimeFlags {
  /// N <= log(x) / 10, a proxy for N = o(log x).
  bool n_small = false;
  /// log log x <= N^(2 - eps).
  bool loglog_small = false;

  bool operator==(const RegimeFlags&) const = default;
};

RegimeFlags regime_flags(double x, int N);

struct ExperimentPlan {
  ProcessSpec process = RmfSpec{};
  std::vector<double> x_grid;
  int N = 8;
  std::uint64_t samples = 1000;
  std::uint64_t master_seed = 0;
  double epsilon = 0.1;
  double delta = 0.1;
  std::vector<double> q_list{1.0, 2.0};
  unsigned workers = 1;

  /// Throws ParameterError: samples >= 1, workers >= 1, ascending x grid of
  /// values >= 1, epsilon > 0, 0 < delta < 1.
  void validate() const;
};

/// Traces of samples 0..samples-1 with shared checkpoints.
struct TraceSet {
  std::vector<std::uint64_t> checkpoints;
  std::vector<PartialSumTrace> traces;

  std::size_t checkpoint_index(std::uint64_t u) const;
  /// M(u) for every sample, in sample order.
  std::vector<double> values_at(std::uint64_t u) const;
  /// Sign changes completing in (a, b] for every sample.
  std::vector<double> changes_between(std::uint64_t a, std::uint64_t b) const;
  /// V(u) for every sample.
  std::vector<double> changes_up_to(std::uint64_t u) const;

  bool operator==(const TraceSet&) const = default;
};

/*!
 * Runs every sample of `process` to the largest checkpoint.
 *
 * Samples are split across `workers` threads; each sample's trace depends
 * only on (seed, sample index), and results are stored by index, so the
 * output is identical for any worker count. Throws ResourceError when the
 * longest trace exceeds the step budget.
 */
TraceSet sample_traces(const ProcessSpec& process, std::uint64_t seed, std::uint64_t samples,
                       std::vector<std::uint64_t> checkpoints, unsigned workers = 1);

/// floor(x) as a trace position; x >= 1.
std::uint64_t position_of(double x);

// Estimators from precomputed traces. The resampling stream of every
// estimate is tagged by its name and parameters.

EstimateWithCI moment_estimate(const TraceSet& set, std::uint64_t u, double q, std::uint64_t seed);
EstimateWithCI expected_v_estimate(const TraceSet& set, std::uint64_t u, std::uint64_t seed);
/// P(at least one sign change in (a, b]); 0 with a degenerate interval when b <= a.
EstimateWithCI sign_change_prob_estimate(const TraceSet& set, std::uint64_t a, std::uint64_t b,
                                         std::uint64_t seed);
/// Pearson correlation of Y_n and Y_m (1 exactly when n == m).
EstimateWithCI correlation_estimate(const TraceSet& set, double x, int n, int m, std::uint64_t seed);
/// (mean |M|^a) / (mean |M|^b)^power, bootstrapped jointly.
EstimateWithCI moment_ratio_estimate(const TraceSet& set, std::uint64_t u, double a, double b,
                                     double power, std::uint64_t seed);

struct EventProbabilities {
  EstimateWithCI p_a;
  EstimateWithCI p_b;
  /// Frequency of a sign change among Y_1..Y_N given A and B; undefined when
  /// N == 1 or no sample has A and B.
  EstimateWithCI p_change_given_ab;
  std::uint64_t n_ab = 0;
  /// Samples with A, B and forcing geometry: every one must show a change.
  std::uint64_t n_forced = 0;
  bool implication_holds = true;
};

EventProbabilities event_estimate(const TraceSet& set, double x, int N, double epsilon,
                                  double delta, std::uint64_t seed);

// Plan-level estimators: each runs its own traces.

EstimateWithCI estimate_moment(const ExperimentPlan& plan, double x, double q);
EstimateWithCI estimate_sign_change_prob(const ExperimentPlan& plan, double x, int N);
EstimateWithCI estimate_expected_V(const ExperimentPlan& plan, double x);
EventProbabilities estimate_event_probs(const ExperimentPlan& plan, double x, int N,
                                        double epsilon, double delta);
EstimateWithCI estimate_correlation(const ExperimentPlan& plan, double x, int n, int m);

/// x_l = exp(l (log l)^(1/2 + epsilon)) for l = 2..ell_max; 0 < epsilon <= 0.01.
std::vector<double> x_ell_grid(double epsilon, int ell_max);

}  // namespace rmflab
