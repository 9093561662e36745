#include "rmflab/budget.hpp"

#include <cstdlib>
#include <string>

#include "rmflab/errors.hpp"

namespace rmflab {

std::uint64_t step_budget() {
  if (const char* env = std::getenv("RMFLAB_BUDGET")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultStepBudget;
}

void require_budget(std::uint64_t steps, std::uint64_t samples, std::string_view what) {
  const auto budget = step_budget();
  if (steps > budget) {
    throw ResourceError(std::string(what) + ": trace of " + std::to_string(steps) +
                            " steps exceeds budget " + std::to_string(budget) +
                            " (required " + std::to_string(steps) + " per trace, " +
                            std::to_string(static_cast<double>(steps) * static_cast<double>(samples)) +
                            " total; set RMFLAB_BUDGET to override)",
                        steps);
  }
}

}  // namespace rmflab
