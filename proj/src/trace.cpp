#include "rmflab/trace.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rmflab/errors.hpp"

namespace rmflab {

CheckpointRecorder::CheckpointRecorder(std::span<const std::uint64_t> requests,
                                       std::uint64_t x_end)
    : requests_(requests.begin(), requests.end()),
      order_(requests.size()),
      values_(requests.size(), 0.0),
      changes_(requests.size(), 0),
      signs_(requests.size(), 0) {
  for (auto u : requests_) {
    if (u < 1 || u > x_end) {
      throw ParameterError("checkpoint " + std::to_string(u) + " outside [1, " +
                           std::to_string(x_end) + "]");
    }
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return requests_[a] < requests_[b]; });
}

void CheckpointRecorder::record(double value, std::uint64_t changes, int last_sign) {
  const auto u = next_position();
  while (cursor_ < order_.size() && requests_[order_[cursor_]] == u) {
    const auto i = order_[cursor_++];
    values_[i] = value;
    changes_[i] = changes;
    signs_[i] = static_cast<std::int8_t>(last_sign);
  }
}

void CheckpointRecorder::finish_into(PartialSumTrace& trace) {
  trace.checkpoint_requests = std::move(requests_);
  trace.checkpoint_values = std::move(values_);
  trace.checkpoint_changes = std::move(changes_);
  trace.checkpoint_signs = std::move(signs_);
}

}  // namespace rmflab
