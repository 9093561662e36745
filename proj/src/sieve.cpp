#include "rmflab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmflab/errors.hpp"

namespace rmflab {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 first_multiple_at_least(u64 lo, u64 step) { return (lo + step - 1) / step * step; }

}  // namespace

u64 isqrt(u64 n) {
  auto r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are a deterministic witness set for all n < 2^64.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 y = pow_mod(a, d, n);
    if (y == 1 || y == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      y = mul_mod(y, y, n);
      if (y == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeTable primes_up_to(u64 limit) {
  if (limit < 2 || limit > kMaxPrimeLimit) {
    throw ParameterError("primes_up_to: limit " + std::to_string(limit) +
                         " outside [2, 2^40]");
  }
  const u64 root = isqrt(limit);
  std::vector<std::uint8_t> base(root + 1, 1);
  std::vector<u64> small;
  for (u64 i = 2; i <= root; ++i) {
    if (!base[i]) continue;
    small.push_back(i);
    for (u64 j = i * i; j <= root; j += i) base[j] = 0;
  }

  std::vector<u64> primes;
  if (limit > 100) {
    const double estimate = static_cast<double>(limit) / (std::log(static_cast<double>(limit)) - 1.1);
    primes.reserve(static_cast<std::size_t>(estimate));
  }
  const u64 segment = std::max<u64>(root + 1, u64{1} << 18);
  std::vector<std::uint8_t> mark(segment);
  for (u64 lo = 2; lo <= limit; lo += segment) {
    const u64 hi = std::min(limit + 1, lo + segment);
    std::fill(mark.begin(), mark.begin() + static_cast<std::ptrdiff_t>(hi - lo), 1);
    for (u64 p : small) {
      if (p * p >= hi) break;
      for (u64 m = std::max(p * p, first_multiple_at_least(lo, p)); m < hi; m += p) mark[m - lo] = 0;
    }
    for (u64 n = lo; n < hi; ++n) {
      if (mark[n - lo]) primes.push_back(n);
    }
  }
  return PrimeTable(limit, std::move(primes));
}

std::vector<std::int8_t> mobius_up_to(u64 limit) {
  std::vector<std::int8_t> mu(limit + 1, 1);
  if (limit == 0) {
    mu[0] = 0;
    return mu;
  }
  mu[0] = 0;
  std::vector<std::uint8_t> composite(limit + 1, 0);
  std::vector<u64> primes;
  for (u64 i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      mu[i] = -1;
    }
    for (u64 p : primes) {
      const u64 m = i * p;
      if (m > limit) break;
      composite[m] = 1;
      if (i % p == 0) {
        mu[m] = 0;
        break;
      }
      mu[m] = static_cast<std::int8_t>(-mu[i]);
    }
  }
  return mu;
}

u64 squarefree_count(u64 x) {
  if (x < 1) throw ParameterError("squarefree_count: x must be >= 1");
  const u64 root = isqrt(x);
  const auto mu = mobius_up_to(root);
  std::int64_t total = 0;
  for (u64 d = 1; d <= root; ++d) {
    if (mu[d] != 0) total += mu[d] * static_cast<std::int64_t>(x / (d * d));
  }
  return static_cast<u64>(total);
}

std::size_t FactorSegment::index(u64 n) const {
  if (n < lo_ || n >= hi_) {
    throw ParameterError("FactorSegment: " + std::to_string(n) + " outside segment");
  }
  return static_cast<std::size_t>(n - lo_);
}

FactorSegment factor_segment(u64 lo, u64 hi, const PrimeTable& primes) {
  if (lo < 1 || lo >= hi) throw ParameterError("factor_segment: need 1 <= lo < hi");
  if (primes.limit() < isqrt(hi - 1)) {
    throw ParameterError("factor_segment: prime table limit " + std::to_string(primes.limit()) +
                         " below floor(sqrt(hi - 1)) = " + std::to_string(isqrt(hi - 1)));
  }
  FactorSegment seg;
  seg.lo_ = lo;
  seg.hi_ = hi;
  const auto len = static_cast<std::size_t>(hi - lo);
  seg.squarefree_.assign(len, 1);
  seg.cofactor_.resize(len);
  for (std::size_t i = 0; i < len; ++i) seg.cofactor_[i] = lo + i;

  std::vector<std::uint32_t> counts(len, 0);
  for (u64 p : primes.primes()) {
    if (p >= hi) break;
    for (u64 m = first_multiple_at_least(lo, p); m < hi; m += p) ++counts[m - lo];
  }
  seg.offsets_.resize(len + 1);
  seg.offsets_[0] = 0;
  for (std::size_t i = 0; i < len; ++i) seg.offsets_[i + 1] = seg.offsets_[i] + counts[i];
  seg.primes_.resize(seg.offsets_[len]);

  std::fill(counts.begin(), counts.end(), 0);
  for (u64 p : primes.primes()) {
    if (p >= hi) break;
    for (u64 m = first_multiple_at_least(lo, p); m < hi; m += p) {
      const auto i = static_cast<std::size_t>(m - lo);
      seg.primes_[seg.offsets_[i] + counts[i]++] = p;
      u64 rem = seg.cofactor_[i] / p;
      if (rem % p == 0) {
        seg.squarefree_[i] = 0;
        while (rem % p == 0) rem /= p;
      }
      seg.cofactor_[i] = rem;
    }
  }
  return seg;
}

void squarefree_segment(u64 lo, u64 hi, const PrimeTable& primes, SquarefreeSegment& out) {
  if (lo < 1 || lo >= hi) throw ParameterError("squarefree_segment: need 1 <= lo < hi");
  const u64 root = isqrt(hi - 1);
  if (primes.limit() < root) {
    throw ParameterError("squarefree_segment: prime table below floor(sqrt(hi - 1))");
  }
  const auto all = primes.primes();
  const auto used = static_cast<std::size_t>(
      std::upper_bound(all.begin(), all.end(), root) - all.begin());
  out.lo = lo;
  out.hi = hi;
  out.sieving_primes = all.first(used);

  const auto len = static_cast<std::size_t>(hi - lo);
  out.squarefree.assign(len, 1);
  out.odd_small_factors.assign(len, 0);
  out.cofactor.assign(len, 1);
  auto* sq = out.squarefree.data();
  auto* odd = out.odd_small_factors.data();
  auto* prod = out.cofactor.data();
  for (u64 p : out.sieving_primes) {
    for (u64 m = first_multiple_at_least(lo, p); m < hi; m += p) {
      prod[m - lo] *= p;
      odd[m - lo] ^= 1;
    }
    const u64 p2 = p * p;
    for (u64 m = first_multiple_at_least(lo, p2); m < hi; m += p2) sq[m - lo] = 0;
  }
  for (std::size_t i = 0; i < len; ++i) {
    prod[i] = sq[i] ? (lo + i) / prod[i] : 0;
  }
}

u64 segment_length_for(u64 x) { return std::max(kDefaultSegmentLength, isqrt(x) + 1); }

PartialSumTrace mertens_trace(u64 x, std::span<const u64> checkpoints) {
  if (x < 1) throw ParameterError("mertens_trace: x must be >= 1");
  CheckpointRecorder recorder(checkpoints, x);
  const auto table = primes_up_to(std::max<u64>(2, isqrt(x)));
  const u64 seg_len = segment_length_for(x);

  SquarefreeSegment seg;
  SignTracker tracker;
  std::int64_t m = 0;
  for (u64 lo = 1; lo <= x; lo += seg_len) {
    const u64 hi = std::min(x + 1, lo + seg_len);
    squarefree_segment(lo, hi, table, seg);
    for (u64 n = lo; n < hi; ++n) {
      const auto i = n - lo;
      if (seg.squarefree[i]) {
        const bool negative = (seg.odd_small_factors[i] != 0) != (seg.cofactor[i] > 1);
        m += negative ? -1 : 1;
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
  trace.model_tag = "mertens";
  recorder.finish_into(trace);
  return trace;
}

}  // namespace rmflab
