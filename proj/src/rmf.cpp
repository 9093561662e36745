#include "rmflab/rmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmflab/budget.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/summation.hpp"

namespace rmflab {

int f_value(const SignOracle& oracle, std::uint64_t n, const FactorSegment& segment) {
  if (!segment.squarefree(n)) return 0;
  int sign = 1;
  std::uint64_t product = 1;
  for (auto p : segment.small_primes(n)) {
    sign *= oracle.sign(p);
    product *= p;
  }
  const auto cof = segment.cofactor(n);
  if (cof > 1) sign *= oracle.sign(cof);
  if (product * cof != n) {
    throw InternalError("f_value: factorization of " + std::to_string(n) + " is inconsistent");
  }
  return sign;
}

PartialSumTrace rmf_trace(const SignOracle& oracle, std::uint64_t x,
                          std::span<const std::uint64_t> checkpoints) {
  if (x < 1) throw ParameterError("rmf_trace: x must be >= 1");
  CheckpointRecorder recorder(checkpoints, x);
  const auto table = primes_up_to(std::max<std::uint64_t>(2, isqrt(x)));
  const auto seg_len = segment_length_for(x);

  SignTracker tracker;
  std::int64_t m = 0;
  for (std::uint64_t lo = 1; lo <= x; lo += seg_len) {
    const auto hi = std::min(x + 1, lo + seg_len);
    const auto seg = factor_segment(lo, hi, table);
    for (std::uint64_t n = lo; n < hi; ++n) {
      if (const int f = f_value(oracle, n, seg); f != 0) {
        m += f;
        tracker.observe(static_cast<double>(m));
      }
      if (n == recorder.next_position()) {
        recorder.record(static_cast<double>(m), tracker.count(), tracker.last_sign());
      }
    }
  }

  PartialSumTrace trace;
  trace.x_end = x;
  trace.final_value = static_cast<double>(m);
  trace.sign_change_count = tracker.count();
  trace.model_tag = "rmf";
  recorder.finish_into(trace);
  return trace;
}

std::vector<std::uint64_t> grid_positions(double x, int N) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(std::max(N, 0)));
  for (int n = 1; n <= N; ++n) {
    out.push_back(static_cast<std::uint64_t>(std::floor(std::exp(static_cast<double>(n)) * x)));
  }
  return out;
}

CheckpointGrid grid_from_values(double x, int N, std::span<const double> m_values) {
  if (m_values.size() != static_cast<std::size_t>(N)) {
    throw ParameterError("grid_from_values: expected N values");
  }
  CheckpointGrid grid;
  grid.x = x;
  grid.N = N;
  grid.y.resize(static_cast<std::size_t>(N));
  CompensatedSum s, s_star;
  for (int n = 1; n <= N; ++n) {
    const double y = m_values[static_cast<std::size_t>(n - 1)] /
                     std::sqrt(std::exp(static_cast<double>(n)) * x);
    grid.y[static_cast<std::size_t>(n - 1)] = y;
    s += y;
    s_star += std::fabs(y);
  }
  grid.s_n = s.value();
  grid.s_n_star = s_star.value();
  return grid;
}

CheckpointGrid checkpoint_grid(const SignOracle& oracle, double x, int N) {
  if (!(x >= 2.0) || N < 1) throw ParameterError("checkpoint_grid: need x >= 2 and N >= 1");
  const double top = std::exp(static_cast<double>(N)) * x;
  if (!(top < 1.8e19)) throw ResourceError("checkpoint_grid: e^N x overflows", ~std::uint64_t{0});
  const auto positions = grid_positions(x, N);
  require_budget(positions.back(), 1, "checkpoint_grid");
  const auto trace = rmf_trace(oracle, positions.back(), positions);
  return grid_from_values(x, N, trace.checkpoint_values);
}

}  // namespace rmflab
