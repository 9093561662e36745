#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rmflab {

/*!
 * Streaming record of a partial-sum walk M(u), u = 1..x_end.
 *
 * Values are stored as doubles; for integer-valued walks (Moebius, RMF,
 * Rademacher) they are exact because |M(u)| <= u < 2^53.
 *
 * For each requested checkpoint u we keep M(u), the number of sign changes
 * completed at positions <= u, and the last nonzero sign seen at positions
 * <= u (0 if the walk has been identically zero so far). The sign-change
 * count over (a, b] is then changes(b) - changes(a), with the entering sign
 * taken from the last nonzero value at or before a.
 */
struct PartialSumTrace {
  std::uint64_t x_end = 0;
  double final_value = 0.0;
  std::uint64_t sign_change_count = 0;
  std::vector<std::uint64_t> checkpoint_requests;
  std::vector<double> checkpoint_values;
  std::vector<std::uint64_t> checkpoint_changes;
  std::vector<std::int8_t> checkpoint_signs;
  std::string model_tag;

  /// Sign changes completing in (checkpoint a, checkpoint b].
  std::uint64_t changes_between(std::size_t a, std::size_t b) const {
    return checkpoint_changes[b] - checkpoint_changes[a];
  }

  bool operator==(const PartialSumTrace&) const = default;
};

/// Zero-skip sign-change counter: zeros are ignored, and a change is counted
/// whenever a nonzero value has the opposite sign of the last nonzero value.
class SignTracker {
 public:
  /// Returns true when the observed value completes a sign change.
  bool observe(double value) {
    const int s = (value > 0) - (value < 0);
    if (s == 0) return false;
    const bool changed = last_ != 0 && s != last_;
    last_ = s;
    count_ += changed ? 1 : 0;
    return changed;
  }

  int last_sign() const { return last_; }
  std::uint64_t count() const { return count_; }

 private:
  int last_ = 0;
  std::uint64_t count_ = 0;
};

/*!
 * Walks through checkpoint requests in ascending position order while a
 * trace streams forward, writing results back in request order.
 */
class CheckpointRecorder {
 public:
  static constexpr std::uint64_t kDone = std::numeric_limits<std::uint64_t>::max();

  /// Throws ParameterError unless every request lies in [1, x_end].
  CheckpointRecorder(std::span<const std::uint64_t> requests, std::uint64_t x_end);

  std::uint64_t next_position() const {
    return cursor_ < order_.size() ? requests_[order_[cursor_]] : kDone;
  }

  /// Records the state at next_position() for every request at that position.
  void record(double value, std::uint64_t changes, int last_sign);

  /// Moves the recorded checkpoint data into `trace`.
  void finish_into(PartialSumTrace& trace);

 private:
  std::vector<std::uint64_t> requests_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> changes_;
  std::vector<std::int8_t> signs_;
};

}  // namespace rmflab
