#include "rmflab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "rmflab/errors.hpp"
#include "rmflab/oracle.hpp"
#include "rmflab/summation.hpp"

namespace rmflab {
namespace {

/// Type-7 sample quantile of sorted data.
double quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double spearman_rho(std::span<const double> x_ranks, std::span<const double> y_ranks) {
  return pearson(x_ranks, y_ranks);
}

}  // namespace

EstimateWithCI bootstrap(std::size_t n, const IndexedStatistic& statistic, std::uint64_t seed,
                         std::uint64_t stream_id, int resamples) {
  EstimateWithCI out;
  out.n_samples = n;
  out.seed = seed;
  if (n == 0) return out;
  if (resamples < 2) throw ParameterError("bootstrap: need at least 2 resamples");

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  out.point = statistic(indices);

  CounterRng rng(stream_key(seed, StreamDomain::bootstrap, stream_id));
  std::vector<double> replicates;
  replicates.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    for (auto& i : indices) i = static_cast<std::size_t>(rng.below(n));
    const double v = statistic(indices);
    if (v == v) replicates.push_back(v);
  }
  if (replicates.size() < 2) {
    out.ci_lo = out.ci_hi = out.point;
    out.standard_error = 0.0;
    return out;
  }
  std::sort(replicates.begin(), replicates.end());
  const double mean = compensated_mean(replicates);
  CompensatedSum ss;
  for (double v : replicates) ss += (v - mean) * (v - mean);
  out.standard_error = std::sqrt(ss.value() / static_cast<double>(replicates.size() - 1));
  out.ci_lo = quantile(replicates, 0.025);
  out.ci_hi = quantile(replicates, 0.975);
  if (out.point == out.point) {
    out.ci_lo = std::min(out.ci_lo, out.point);
    out.ci_hi = std::max(out.ci_hi, out.point);
  }
  return out;
}

double indexed_mean(std::span<const double> values, std::span<const std::size_t> indices) {
  CompensatedSum sum;
  for (auto i : indices) sum += values[i];
  return indices.empty() ? std::nan("") : sum.value() / static_cast<double>(indices.size());
}

EstimateWithCI bootstrap_mean(std::span<const double> values, std::uint64_t seed,
                              std::uint64_t stream_id, int resamples) {
  return bootstrap(
      values.size(), [&](std::span<const std::size_t> idx) { return indexed_mean(values, idx); },
      seed, stream_id, resamples);
}

double indexed_pearson(std::span<const double> a, std::span<const double> b,
                       std::span<const std::size_t> indices) {
  const double ma = indexed_mean(a, indices);
  const double mb = indexed_mean(b, indices);
  CompensatedSum sab, saa, sbb;
  for (auto i : indices) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  const double denom = std::sqrt(saa.value() * sbb.value());
  return denom > 0.0 ? sab.value() / denom : std::nan("");
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("pearson: size mismatch");
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return indexed_pearson(a, b, idx);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

SpearmanTrend spearman_decreasing_test(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw ParameterError("spearman_decreasing_test: need at least 2 values");
  std::vector<double> positions(n);
  std::iota(positions.begin(), positions.end(), 1.0);
  const auto ranks = average_ranks(values);

  SpearmanTrend out;
  out.rho = spearman_rho(positions, ranks);
  if (out.rho != out.rho) {
    // All values tied: no trend in either direction.
    out.rho = 0.0;
    out.p_decreasing = 1.0;
    return out;
  }
  if (n <= 8) {
    std::vector<double> perm = ranks;
    std::sort(perm.begin(), perm.end());
    std::size_t total = 0;
    std::size_t at_most = 0;
    do {
      ++total;
      if (spearman_rho(positions, perm) <= out.rho + 1e-12) ++at_most;
    } while (std::next_permutation(perm.begin(), perm.end()));
    // next_permutation enumerates distinct arrangements; with ties each is
    // equally likely under exchangeability, so the ratio is exact.
    out.p_decreasing = static_cast<double>(at_most) / static_cast<double>(total);
  } else {
    const double z = out.rho * std::sqrt(static_cast<double>(n) - 1.0);
    out.p_decreasing = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("fit_line: need >= 2 paired points");
  const double mx = compensated_mean(x);
  const double my = compensated_mean(y);
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx.value() > 0.0)) throw ParameterError("fit_line: x has no spread");
  LinearFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum ssr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  fit.ssr = ssr.value();
  return fit;
}

std::uint64_t stream_tag(std::string_view name, std::initializer_list<double> parameters) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (unsigned char c : name) h = mix64(h ^ c);
  for (double p : parameters) {
    std::uint64_t bits;
    std::memcpy(&bits, &p, sizeof bits);
    h = mix64(h ^ bits);
  }
  return h;
}

}  // namespace rmflab
