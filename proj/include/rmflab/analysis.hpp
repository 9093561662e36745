#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rmflab/rmf.hpp"

namespace rmflab {

/*!
 * Parameters of Lambda(N, x, q) = sum_{n<=N} (1 + (1-q/2) sqrt(log log(e^n x)))^(-q/2).
 *
 * x is carried as log log x so that astronomically large x (log log x = 10^4)
 * stays representable; log log(e^n x) = L + log1p(n e^(-L)).
 */
struct LambdaParams {
  int N = 1;
  double log_log_x = 0.0;
  double q = 1.0;

  static LambdaParams from_x(int N, double x, double q);
  static LambdaParams from_log_log(int N, double log_log_x, double q);
};

/// Compensated sum of the Lambda terms. Requires N >= 1, x >= e, q in [1, 2].
double lambda_exact(const LambdaParams& params);

/// N / ((1 - q/2)^(q/2) (log log x)^(q/4)). Requires q in [1, 1.9] and x > e.
double lambda_asymptotic(const LambdaParams& params);

/// Lambda for any x >= 1 (log log(e^n x) >= 0 for n >= 1); used by the event
/// experiments, whose grids may start below e.
double lambda_sum(int N, double log_x, double q);

/// (x / (1 + (1 - q/2) sqrt(log log x)))^(q/2), x >= e^e, q in [1, 2].
double harper_predictor(double x, double q);

struct SignChangeReport {
  std::uint64_t count = 0;
  /// 0-based index of the later element of each counted pair.
  std::vector<std::size_t> positions;
  /// Maximal runs of exact zeros.
  std::uint64_t zero_runs = 0;
};

/// Zero-skip census: zeros are dropped, then adjacent opposite signs counted.
SignChangeReport count_sign_changes(std::span<const double> values);

/// E M_f(a) M_f(b) = Q(min(a, b)).
double exact_cross_moment(std::uint64_t a, std::uint64_t b);

/// Moments of Y_n = M_f(floor(e^n x)) / sqrt(e^n x), from Q.
double exact_mean_y(double x, int n);
double exact_cross_y(double x, int n, int m);
double exact_variance_y(double x, int n);

/// Pearson correlation of Y_n and Y_m; n == m gives 1. Throws ParameterError
/// unless 1 <= n <= m, ResourceError if e^m x does not fit in 63 bits.
double exact_correlation(double x, int n, int m);

/// E S_N^2 = sum_{n,m<=N} E Y_n Y_m.
double exact_second_moment_sum(int N, double x);

/// Markov bound P(|S_N| >= lambda) <= E S_N^2 / lambda^2.
double chebyshev_tail_bound(int N, double lambda, double x);

struct EventOutcome {
  double lambda = 0.0;
  /// A: S_N* >= epsilon * Lambda(N, x, 1).
  bool a = false;
  /// B: |S_N| <= Lambda(N, x, 1)^(1 - delta).
  bool b = false;
  /// Lambda^(1-delta) < epsilon * Lambda, under which A and B force a change.
  bool geometry_forces_change = false;
  /// Zero-skip sign change among Y_1..Y_N.
  bool sign_change = false;
};

/// Throws ParameterError unless epsilon > 0 and 0 < delta < 1.
EventOutcome event_indicators(const CheckpointGrid& grid, double epsilon, double delta);

}  // namespace rmflab
