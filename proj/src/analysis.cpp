#include "rmflab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rmflab/errors.hpp"
#include "rmflab/summation.hpp"

namespace rmflab {
namespace {

void check_q(double q, double hi, const char* what) {
  if (!(q >= 1.0 && q <= hi)) {
    throw ParameterError(std::string(what) + ": q must lie in [1, " + std::to_string(hi) + "]");
  }
}

double lambda_term(double log_log, double q) {
  return std::pow(1.0 + (1.0 - q / 2.0) * std::sqrt(log_log), -q / 2.0);
}

std::uint64_t grid_point(double x, int n) {
  const double v = std::exp(static_cast<double>(n)) * x;
  if (!(v < 4.6e18)) throw ResourceError("grid point e^n x exceeds 63 bits", ~std::uint64_t{0});
  return static_cast<std::uint64_t>(std::floor(v));
}

}  // namespace

LambdaParams LambdaParams::from_x(int N, double x, double q) {
  if (!(x >= std::numbers::e)) throw ParameterError("Lambda: x must be >= e");
  return from_log_log(N, std::max(0.0, std::log(std::log(x))), q);
}

LambdaParams LambdaParams::from_log_log(int N, double log_log_x, double q) {
  if (N < 1) throw ParameterError("Lambda: N must be >= 1");
  if (!(log_log_x >= 0.0)) throw ParameterError("Lambda: x must be >= e");
  check_q(q, 2.0, "Lambda");
  return LambdaParams{N, log_log_x, q};
}

double lambda_exact(const LambdaParams& p) {
  if (p.N < 1 || !(p.log_log_x >= 0.0)) throw ParameterError("lambda_exact: need N >= 1, x >= e");
  check_q(p.q, 2.0, "lambda_exact");
  // log x = e^L may overflow; exp(-L) underflowing to 0 is then exact enough.
  const double inv_log_x = std::exp(-p.log_log_x);
  CompensatedSum sum;
  for (int n = 1; n <= p.N; ++n) {
    sum += lambda_term(p.log_log_x + std::log1p(n * inv_log_x), p.q);
  }
  return sum.value();
}

double lambda_asymptotic(const LambdaParams& p) {
  check_q(p.q, 1.9, "lambda_asymptotic");
  if (!(p.log_log_x > 0.0)) throw ParameterError("lambda_asymptotic: need x > e");
  return p.N / (std::pow(1.0 - p.q / 2.0, p.q / 2.0) * std::pow(p.log_log_x, p.q / 4.0));
}

double lambda_sum(int N, double log_x, double q) {
  if (N < 1 || !(log_x >= 0.0)) throw ParameterError("lambda_sum: need N >= 1 and x >= 1");
  check_q(q, 2.0, "lambda_sum");
  CompensatedSum sum;
  for (int n = 1; n <= N; ++n) sum += lambda_term(std::log(n + log_x), q);
  return sum.value();
}

double harper_predictor(double x, double q) {
  if (!(x >= std::exp(std::numbers::e))) throw ParameterError("harper_predictor: x must be >= e^e");
  check_q(q, 2.0, "harper_predictor");
  const double deficit = 1.0 + (1.0 - q / 2.0) * std::sqrt(std::log(std::log(x)));
  return std::pow(x / deficit, q / 2.0);
}

SignChangeReport count_sign_changes(std::span<const double> values) {
  SignChangeReport report;
  int last = 0;
  bool in_zero_run = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v == 0.0) {
      if (!in_zero_run) ++report.zero_runs;
      in_zero_run = true;
      continue;
    }
    in_zero_run = false;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) {
      ++report.count;
      report.positions.push_back(i);
    }
    last = s;
  }
  return report;
}

double exact_cross_moment(std::uint64_t a, std::uint64_t b) {
  if (a < 1 || b < 1) throw ParameterError("exact_cross_moment: a, b must be >= 1");
  return static_cast<double>(squarefree_count(std::min(a, b)));
}

double exact_mean_y(double x, int n) { return 1.0 / std::sqrt(std::exp(static_cast<double>(n)) * x); }

double exact_cross_y(double x, int n, int m) {
  const int lo = std::min(n, m);
  const double q = static_cast<double>(squarefree_count(grid_point(x, lo)));
  return q / (std::exp(0.5 * (n + m)) * x);
}

double exact_variance_y(double x, int n) {
  const double scale = std::exp(static_cast<double>(n)) * x;
  return static_cast<double>(squarefree_count(grid_point(x, n))) / scale - 1.0 / scale;
}

double exact_correlation(double x, int n, int m) {
  if (n < 1 || m < n) throw ParameterError("exact_correlation: need 1 <= n <= m");
  if (!(x >= 1.0)) throw ParameterError("exact_correlation: x must be >= 1");
  if (n == m) return 1.0;
  grid_point(x, m);
  const double cov = exact_cross_y(x, n, m) - exact_mean_y(x, n) * exact_mean_y(x, m);
  return cov / std::sqrt(exact_variance_y(x, n) * exact_variance_y(x, m));
}

double exact_second_moment_sum(int N, double x) {
  if (N < 1 || !(x >= 1.0)) throw ParameterError("exact_second_moment_sum: need N >= 1, x >= 1");
  std::vector<double> q(static_cast<std::size_t>(N) + 1);
  for (int n = 1; n <= N; ++n) q[n] = static_cast<double>(squarefree_count(grid_point(x, n)));
  CompensatedSum sum;
  for (int n = 1; n <= N; ++n) {
    for (int m = 1; m <= N; ++m) sum += q[std::min(n, m)] / (std::exp(0.5 * (n + m)) * x);
  }
  return sum.value();
}

double chebyshev_tail_bound(int N, double lambda, double x) {
  if (!(lambda > 0.0)) throw ParameterError("chebyshev_tail_bound: lambda must be > 0");
  return exact_second_moment_sum(N, x) / (lambda * lambda);
}

EventOutcome event_indicators(const CheckpointGrid& grid, double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw ParameterError("event_indicators: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("event_indicators: delta must lie in (0, 1)");
  if (grid.N < 1 || grid.y.size() != static_cast<std::size_t>(grid.N) || !(grid.x >= 1.0)) {
    throw ParameterError("event_indicators: invalid grid");
  }
  EventOutcome out;
  out.lambda = lambda_sum(grid.N, std::log(grid.x), 1.0);
  const double shrunk = std::pow(out.lambda, 1.0 - delta);
  out.a = grid.s_n_star >= epsilon * out.lambda;
  out.b = std::fabs(grid.s_n) <= shrunk;
  out.geometry_forces_change = shrunk < epsilon * out.lambda;
  out.sign_change = count_sign_changes(grid.y).count > 0;
  return out;
}

}  // namespace rmflab
