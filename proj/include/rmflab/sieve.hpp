#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmflab/trace.hpp"

namespace rmflab {

/// Largest limit accepted by primes_up_to.
inline constexpr std::uint64_t kMaxPrimeLimit = std::uint64_t{1} << 40;

/// Default number of integers per sieve segment.
inline constexpr std::uint64_t kDefaultSegmentLength = std::uint64_t{1} << 20;

/// All primes up to a limit, ascending.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint64_t> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  std::uint64_t operator[](std::size_t i) const { return primes_[i]; }

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
};

/*!
 * Factorization data for every integer of a half-open segment [lo, hi).
 *
 * Each integer n is divided by every prime of the table that divides it. The
 * distinct primes found are kept (CSR layout), and whatever remains after
 * removing them with multiplicity is the cofactor. When the table reaches
 * floor(sqrt(hi - 1)), the cofactor is 1 or a single prime exceeding the
 * table limit.
 */
class FactorSegment {
 public:
  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }
  std::size_t size() const { return static_cast<std::size_t>(hi_ - lo_); }

  bool squarefree(std::uint64_t n) const { return squarefree_[index(n)] != 0; }
  std::uint64_t cofactor(std::uint64_t n) const { return cofactor_[index(n)]; }
  std::span<const std::uint64_t> small_primes(std::uint64_t n) const {
    const auto i = index(n);
    return std::span<const std::uint64_t>(primes_).subspan(
        offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

 private:
  friend FactorSegment factor_segment(std::uint64_t, std::uint64_t, const PrimeTable&);
  std::size_t index(std::uint64_t n) const;

  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
  std::vector<std::uint8_t> squarefree_;
  std::vector<std::uint64_t> cofactor_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint64_t> primes_;
};

/*!
 * Compact per-segment data for the streaming kernels: squarefree flag, the
 * parity of the number of small prime factors, and the large-prime cofactor
 * (1 or a prime) for squarefree entries.
 */
struct SquarefreeSegment {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::vector<std::uint8_t> squarefree;
  std::vector<std::uint8_t> odd_small_factors;
  std::vector<std::uint64_t> cofactor;

  /// Primes of the table used; all are <= floor(sqrt(hi - 1)).
  std::span<const std::uint64_t> sieving_primes;
};

PrimeTable primes_up_to(std::uint64_t limit);

/// Exact integer square root.
std::uint64_t isqrt(std::uint64_t n);

/// Deterministic primality test for 64-bit integers.
bool is_prime(std::uint64_t n);

/// Q(x): the number of squarefree integers <= x.
std::uint64_t squarefree_count(std::uint64_t x);

/// Moebius function mu(1..limit); index 0 holds 0.
std::vector<std::int8_t> mobius_up_to(std::uint64_t limit);

FactorSegment factor_segment(std::uint64_t lo, std::uint64_t hi, const PrimeTable& primes);

/// Fills `out` for [lo, hi). `primes` must reach floor(sqrt(hi - 1)).
void squarefree_segment(std::uint64_t lo, std::uint64_t hi, const PrimeTable& primes,
                        SquarefreeSegment& out);

/// Segment length used for traces ending at x: the default, but never below
/// sqrt(x).
std::uint64_t segment_length_for(std::uint64_t x);

/// Streaming partial sums of mu(n) for n <= x with sign-change census.
PartialSumTrace mertens_trace(std::uint64_t x, std::span<const std::uint64_t> checkpoints = {});

}  // namespace rmflab
