#pragma once

#include <cstdint>

namespace rmflab {

/// splitmix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Samples are grouped in blocks of this many lanes; one 64-bit word of the
/// counter-based generator supplies one bit per lane.
inline constexpr std::uint64_t kLanes = 64;

/// Independent random streams derived from one master seed.
enum class StreamDomain : std::uint64_t {
  rmf_primes = 1,
  model_steps = 2,
  model_phase = 3,
  bootstrap = 4,
  entropy = 5,
};

/// Key for the stream (master_seed, domain, block).
constexpr std::uint64_t stream_key(std::uint64_t master_seed, StreamDomain domain,
                                   std::uint64_t block) {
  const auto d = mix64(master_seed ^ mix64(static_cast<std::uint64_t>(domain) * kGoldenGamma));
  return mix64(d + (block + 1) * kGoldenGamma);
}

/// Counter-based word: 64 fair bits, a pure function of (key, counter).
constexpr std::uint64_t lane_word(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + counter * kGoldenGamma);
}

/// Sequential generator over the counter-based words of one key.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() { return lane_word(key_, ++counter_); }

  /// Uniform integer in [0, bound), bound >= 1 (multiply-high reduction).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class OracleKind { pseudorandom, all_plus, all_minus };

/*!
 * One sample of the Rademacher signs f(p).
 *
 * sign(p) is bit (sample_index mod 64) of lane_word(key, p), with the key
 * derived from (master_seed, rmf_primes, sample_index / 64). Nothing is
 * stored per prime, and the 64 samples of a block share one generator call,
 * which is what the batched trace kernel exploits.
 */
class SignOracle {
 public:
  static SignOracle pseudorandom(std::uint64_t master_seed, std::uint64_t sample_index) {
    return SignOracle(OracleKind::pseudorandom, master_seed, sample_index);
  }
  static SignOracle all_plus() { return SignOracle(OracleKind::all_plus, 0, 0); }
  static SignOracle all_minus() { return SignOracle(OracleKind::all_minus, 0, 0); }

  OracleKind kind() const { return kind_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t sample_index() const { return sample_index_; }

  /// Unchecked: p is assumed prime.
  int sign(std::uint64_t p) const {
    switch (kind_) {
      case OracleKind::all_plus:
        return 1;
      case OracleKind::all_minus:
        return -1;
      case OracleKind::pseudorandom:
        break;
    }
    return ((lane_word(key_, p) >> lane_) & 1) ? -1 : 1;
  }

  /// Bit set = sign -1, for all 64 samples of this oracle's block.
  std::uint64_t block_word(std::uint64_t p) const {
    switch (kind_) {
      case OracleKind::all_plus:
        return 0;
      case OracleKind::all_minus:
        return ~std::uint64_t{0};
      case OracleKind::pseudorandom:
        break;
    }
    return lane_word(key_, p);
  }

 private:
  SignOracle(OracleKind kind, std::uint64_t seed, std::uint64_t index)
      : kind_(kind),
        master_seed_(seed),
        sample_index_(index),
        key_(stream_key(seed, StreamDomain::rmf_primes, index / kLanes)),
        lane_(static_cast<unsigned>(index % kLanes)) {}

  OracleKind kind_;
  std::uint64_t master_seed_;
  std::uint64_t sample_index_;
  std::uint64_t key_;
  unsigned lane_;
};

/// Checked version of SignOracle::sign: throws ParameterError if p is not prime.
int sign_of_prime(const SignOracle& oracle, std::uint64_t p);

}  // namespace rmflab
