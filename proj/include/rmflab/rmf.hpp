#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmflab/oracle.hpp"
#include "rmflab/sieve.hpp"
#include "rmflab/trace.hpp"

namespace rmflab {

/// f(n) for a Rademacher random multiplicative function: 0 unless n is
/// squarefree, otherwise the product of sign(p) over the primes of n.
/// Throws InternalError if the segment's record for n does not multiply
/// back to n.
int f_value(const SignOracle& oracle, std::uint64_t n, const FactorSegment& segment);

/*!
 * Single streaming pass computing M_f(u) = sum_{n <= u} f(n) for u <= x.
 *
 * Reference implementation: one sample at a time, f evaluated from
 * FactorSegment records. Throws ParameterError for checkpoints outside
 * [1, x].
 */
PartialSumTrace rmf_trace(const SignOracle& oracle, std::uint64_t x,
                          std::span<const std::uint64_t> checkpoints = {});

/*!
 * Traces of samples first_sample .. first_sample + count - 1 of the oracle
 * family (kind, master_seed), computed 64 samples at a time.
 *
 * Each block of 64 consecutive sample indices shares one generator word per
 * prime; factorization of each segment is shared by all blocks. The result
 * for sample i equals rmf_trace(SignOracle::pseudorandom(seed, i), ...)
 * exactly.
 */
std::vector<PartialSumTrace> rmf_trace_samples(OracleKind kind, std::uint64_t master_seed,
                                               std::uint64_t first_sample, std::uint64_t count,
                                               std::uint64_t x,
                                               std::span<const std::uint64_t> checkpoints);

/// Y_n = M(floor(e^n x)) / sqrt(e^n x), n = 1..N, with S_N and S_N*.
struct CheckpointGrid {
  double x = 0.0;
  int N = 0;
  std::vector<double> y;
  double s_n = 0.0;
  double s_n_star = 0.0;
};

/// floor(e^n x) for n = 1..N.
std::vector<std::uint64_t> grid_positions(double x, int N);

/// Builds the grid from M evaluated at grid_positions(x, N).
CheckpointGrid grid_from_values(double x, int N, std::span<const double> m_values);

/// Throws ParameterError unless x >= 2 and N >= 1; ResourceError if
/// floor(e^N x) exceeds the step budget.
CheckpointGrid checkpoint_grid(const SignOracle& oracle, double x, int N);

}  // namespace rmflab
