// Bit-sliced RMF kernel: 64 samples advance in lockstep, one bit per sample
// in every generator word. f(n) for all lanes of a block is the XOR of the
// words of the primes dividing n, so one pass of an XOR sieve per segment
// evaluates f for 64 samples at once.

#include <algorithm>
#include <array>
#include <cstring>
#include <type_traits>
#include <limits>
#include <numeric>

#include "rmflab/errors.hpp"
#include "rmflab/rmf.hpp"

namespace rmflab {
namespace {

constexpr std::uint64_t kBatchSegmentLength = std::uint64_t{1} << 16;

template <class Lane>
struct BlockState {
  std::uint64_t first_sample = 0;
  unsigned active = 0;
  std::uint64_t key = 0;
  std::vector<std::uint64_t> prime_words;
  alignas(64) std::array<Lane, kLanes> m{};
  alignas(64) std::array<Lane, kLanes> last{};
  alignas(64) std::array<Lane, kLanes> count{};
  std::vector<Lane> cp_m;
  std::vector<Lane> cp_count;
  std::vector<Lane> cp_sign;
};

/*!
 * Lane state held in vector registers (GCC/Clang vector extensions).
 * Bit j of a step word set means f(n) = -1 in lane j.
 */
template <class Lane>
struct VectorOf;
template <>
struct VectorOf<std::int32_t> {
  typedef std::int32_t type __attribute__((vector_size(64)));
  typedef std::uint32_t utype __attribute__((vector_size(64)));
};
template <>
struct VectorOf<std::int64_t> {
  typedef std::int64_t type __attribute__((vector_size(64)));
  typedef std::uint64_t utype __attribute__((vector_size(64)));
};

template <class Lane>
struct LaneRegisters {
  static constexpr unsigned kWidth = 64 / sizeof(Lane);
  static constexpr unsigned kVectors = kLanes / kWidth;
  using Vec = typename VectorOf<Lane>::type;
  using UVec = typename VectorOf<Lane>::utype;

  Vec m[kVectors], last[kVectors], count[kVectors], shift[kVectors];

  explicit LaneRegisters(const BlockState<Lane>& b) {
    for (unsigned v = 0; v < kVectors; ++v) {
      std::memcpy(&m[v], b.m.data() + v * kWidth, sizeof(Vec));
      std::memcpy(&last[v], b.last.data() + v * kWidth, sizeof(Vec));
      std::memcpy(&count[v], b.count.data() + v * kWidth, sizeof(Vec));
      for (unsigned j = 0; j < kWidth; ++j) shift[v][j] = static_cast<Lane>(j);
    }
  }

  void store(BlockState<Lane>& b) const {
    for (unsigned v = 0; v < kVectors; ++v) {
      std::memcpy(b.m.data() + v * kWidth, &m[v], sizeof(Vec));
      std::memcpy(b.last.data() + v * kWidth, &last[v], sizeof(Vec));
      std::memcpy(b.count.data() + v * kWidth, &count[v], sizeof(Vec));
    }
  }

  inline void advance(std::uint64_t word) {
    const Vec zero = {};
    for (unsigned v = 0; v < kVectors; ++v) {
      const auto chunk = static_cast<std::make_unsigned_t<Lane>>(
          (word >> (v * kWidth)) & ((kWidth == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << kWidth) - 1)));
      const Vec bit = (Vec)(((UVec){} + chunk) >> (UVec)shift[v]) & 1;
      const Vec val = m[v] + 1 - 2 * bit;
      m[v] = val;
      const Vec s = (Vec)((val > zero) & 1) - (Vec)((val < zero) & 1);
      count[v] -= (Vec)((s ^ last[v]) == -2);
      last[v] = (s != zero) ? s : last[v];
    }
  }
};

template <class Lane>
void snapshot(BlockState<Lane>& b, std::size_t request) {
  const auto base = request * kLanes;
  std::copy(b.m.begin(), b.m.end(), b.cp_m.begin() + static_cast<std::ptrdiff_t>(base));
  std::copy(b.count.begin(), b.count.end(), b.cp_count.begin() + static_cast<std::ptrdiff_t>(base));
  std::copy(b.last.begin(), b.last.end(), b.cp_sign.begin() + static_cast<std::ptrdiff_t>(base));
}

std::uint64_t word_for(OracleKind kind, std::uint64_t key, std::uint64_t p) {
  switch (kind) {
    case OracleKind::all_plus:
      return 0;
    case OracleKind::all_minus:
      return ~std::uint64_t{0};
    case OracleKind::pseudorandom:
      break;
  }
  return lane_word(key, p);
}

template <class Lane>
std::vector<PartialSumTrace> run_blocks(OracleKind kind, std::uint64_t seed,
                                        std::uint64_t first_sample, std::uint64_t count,
                                        std::uint64_t x,
                                        std::span<const std::uint64_t> checkpoints) {
  const std::size_t n_req = checkpoints.size();
  std::vector<std::size_t> order(n_req);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return checkpoints[a] < checkpoints[b]; });

  const auto table = primes_up_to(std::max<std::uint64_t>(2, isqrt(x)));
  const auto primes = table.primes();

  std::vector<BlockState<Lane>> blocks;
  for (std::uint64_t s = first_sample; s < first_sample + count;) {
    const std::uint64_t block = s / kLanes;
    const std::uint64_t block_end = std::min(first_sample + count, (block + 1) * kLanes);
    BlockState<Lane> b;
    b.first_sample = s;
    b.active = static_cast<unsigned>(block_end - s);
    b.key = stream_key(seed, StreamDomain::rmf_primes, block);
    b.prime_words.resize(primes.size());
    for (std::size_t k = 0; k < primes.size(); ++k) b.prime_words[k] = word_for(kind, b.key, primes[k]);
    b.cp_m.assign(n_req * kLanes, 0);
    b.cp_count.assign(n_req * kLanes, 0);
    b.cp_sign.assign(n_req * kLanes, 0);
    blocks.push_back(std::move(b));
    s = block_end;
  }

  const std::uint64_t seg_len = std::max(kBatchSegmentLength, isqrt(x) + 1);
  SquarefreeSegment seg;
  std::vector<std::uint64_t> words(seg_len);
  std::vector<std::uint32_t> squarefree_at;
  squarefree_at.reserve(seg_len);
  std::size_t cursor_start = 0;

  for (std::uint64_t lo = 1; lo <= x; lo += seg_len) {
    const std::uint64_t hi = std::min(x + 1, lo + seg_len);
    const auto len = static_cast<std::size_t>(hi - lo);
    squarefree_segment(lo, hi, table, seg);
    const std::size_t n_small = seg.sieving_primes.size();
    const std::uint64_t* cof = seg.cofactor.data();
    squarefree_at.clear();
    for (std::size_t i = 0; i < len; ++i) {
      if (seg.squarefree[i]) squarefree_at.push_back(static_cast<std::uint32_t>(i));
    }

    for (auto& b : blocks) {
      std::fill(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(len), 0);
      for (std::size_t k = 0; k < n_small; ++k) {
        const std::uint64_t w = b.prime_words[k];
        if (w == 0) continue;
        const std::uint64_t p = seg.sieving_primes[k];
        for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) words[m - lo] ^= w;
      }

      // M only moves at squarefree n, so a checkpoint at u sees the state
      // left by the last squarefree n <= u.
      std::size_t cursor = cursor_start;
      std::uint64_t next_cp = cursor < n_req ? checkpoints[order[cursor]] : CheckpointRecorder::kDone;
      LaneRegisters<Lane> regs(b);
      for (const std::uint32_t i : squarefree_at) {
        const std::uint64_t n = lo + i;
        if (next_cp < n) [[unlikely]] {
          regs.store(b);
          while (next_cp < n) {
            snapshot(b, order[cursor]);
            ++cursor;
            next_cp = cursor < n_req ? checkpoints[order[cursor]] : CheckpointRecorder::kDone;
          }
        }
        const std::uint64_t large = word_for(kind, b.key, cof[i]) & (std::uint64_t{0} - (cof[i] > 1));
        regs.advance(words[i] ^ large);
      }
      regs.store(b);
      while (next_cp < hi) {
        snapshot(b, order[cursor]);
        ++cursor;
        next_cp = cursor < n_req ? checkpoints[order[cursor]] : CheckpointRecorder::kDone;
      }
    }
    while (cursor_start < n_req && checkpoints[order[cursor_start]] < hi) ++cursor_start;
  }

  std::vector<PartialSumTrace> out;
  out.reserve(static_cast<std::size_t>(count));
  for (const auto& b : blocks) {
    const unsigned lane0 = static_cast<unsigned>(b.first_sample % kLanes);
    for (unsigned j = 0; j < b.active; ++j) {
      const unsigned lane = lane0 + j;
      PartialSumTrace t;
      t.x_end = x;
      t.final_value = static_cast<double>(b.m[lane]);
      t.sign_change_count = static_cast<std::uint64_t>(b.count[lane]);
      t.model_tag = "rmf";
      t.checkpoint_requests.assign(checkpoints.begin(), checkpoints.end());
      t.checkpoint_values.resize(n_req);
      t.checkpoint_changes.resize(n_req);
      t.checkpoint_signs.resize(n_req);
      for (std::size_t r = 0; r < n_req; ++r) {
        t.checkpoint_values[r] = static_cast<double>(b.cp_m[r * kLanes + lane]);
        t.checkpoint_changes[r] = static_cast<std::uint64_t>(b.cp_count[r * kLanes + lane]);
        t.checkpoint_signs[r] = static_cast<std::int8_t>(b.cp_sign[r * kLanes + lane]);
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace

std::vector<PartialSumTrace> rmf_trace_samples(OracleKind kind, std::uint64_t master_seed,
                                               std::uint64_t first_sample, std::uint64_t count,
                                               std::uint64_t x,
                                               std::span<const std::uint64_t> checkpoints) {
  if (x < 1) throw ParameterError("rmf_trace_samples: x must be >= 1");
  for (auto u : checkpoints) {
    if (u < 1 || u > x) throw ParameterError("rmf_trace_samples: checkpoint outside [1, x]");
  }
  if (count == 0) return {};
  // |M(u)| <= u, so 32-bit lanes are exact below 2^31.
  if (x < (std::uint64_t{1} << 31)) {
    return run_blocks<std::int32_t>(kind, master_seed, first_sample, count, x, checkpoints);
  }
  return run_blocks<std::int64_t>(kind, master_seed, first_sample, count, x, checkpoints);
}

}  // namespace rmflab
