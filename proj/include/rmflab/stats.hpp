#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace rmflab {

/// Number of bootstrap resamples behind every confidence interval.
inline constexpr int kBootstrapResamples = 1000;

/// Monte Carlo point estimate with a 95% bootstrap percentile interval.
struct EstimateWithCI {
  double point = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  /// Standard deviation of the bootstrap replicates.
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t n_samples = 0;
  /// Master seed of the samples; the resampling stream derives from it.
  std::uint64_t seed = 0;

  bool defined() const { return point == point; }
  bool operator==(const EstimateWithCI&) const = default;
};

/// Statistic evaluated on a resample given as indices into the sample.
using IndexedStatistic = std::function<double(std::span<const std::size_t>)>;

/*!
 * Percentile bootstrap of `statistic` over n observations.
 *
 * Resample indices come from the bootstrap stream of (seed, stream_id), so
 * intervals are reproducible. The interval is widened if needed so that it
 * contains the point estimate. n == 0 yields an undefined estimate.
 */
EstimateWithCI bootstrap(std::size_t n, const IndexedStatistic& statistic, std::uint64_t seed,
                         std::uint64_t stream_id, int resamples = kBootstrapResamples);

/// Bootstrap of the compensated sample mean.
EstimateWithCI bootstrap_mean(std::span<const double> values, std::uint64_t seed,
                              std::uint64_t stream_id, int resamples = kBootstrapResamples);

/// Compensated mean over the selected indices.
double indexed_mean(std::span<const double> values, std::span<const std::size_t> indices);

/// Pearson correlation over the selected indices; NaN when a variance is 0.
double indexed_pearson(std::span<const double> a, std::span<const double> b,
                       std::span<const std::size_t> indices);
double pearson(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based), ties share the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct SpearmanTrend {
  double rho = 0.0;
  /// P(rho_perm <= rho) under exchangeability: small values indicate a
  /// decreasing trend of the values along their order.
  double p_decreasing = 1.0;
};

/// Exact permutation test for n <= 8, normal approximation above.
SpearmanTrend spearman_decreasing_test(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Sum of squared residuals.
  double ssr = 0.0;
};

/// Ordinary least squares fit y = intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Stable 64-bit tag for naming derived random streams.
std::uint64_t stream_tag(std::string_view name, std::initializer_list<double> parameters = {});

}  // namespace rmflab
