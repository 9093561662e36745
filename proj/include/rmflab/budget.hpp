#pragma once

#include <cstdint>
#include <string_view>

namespace rmflab {

/// Default ceiling on the length (integer steps) of any single trace.
inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000'000ULL;

/// Per-trace step ceiling: RMFLAB_BUDGET if set to a positive integer,
/// otherwise kDefaultStepBudget.
std::uint64_t step_budget();

/// Throws ResourceError (reporting `steps` and steps * samples) when a trace
/// of `steps` integer steps exceeds step_budget().
void require_budget(std::uint64_t steps, std::uint64_t samples, std::string_view what);

}  // namespace rmflab
