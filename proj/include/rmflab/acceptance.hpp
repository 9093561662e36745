#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rmflab/montecarlo.hpp"

namespace rmflab {

/// Default seed of the acceptance run (distinct from the pilot seed).
inline constexpr std::uint64_t kAcceptanceSeed = 20240601;

struct AcceptanceOptions {
  std::uint64_t seed = kAcceptanceSeed;
  unsigned workers = 1;
  /// Criterion numbers to run (1..12); empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;

/// "[PASS] C<id> <title> (<seconds>s): <detail>"
std::string format_result(const CriterionResult& result);

/// Runs the selected criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result);


/// Local sign-change probability over (x, e^N x], N = 8, for x in {1e3, 1e4, 1e5}.
struct SignProbSweep {
  int N = 8;
  std::vector<double> x{1e3, 1e4, 1e5};
  std::vector<EstimateWithCI> p;
};
SignProbSweep sign_prob_sweep(std::uint64_t seed, std::uint64_t samples, unsigned workers);

/// E V(x) on x_ell_grid(0.01) restricted to [1e3, 1e6].
struct AveragedVSweep {
  std::vector<double> x;
  std::vector<EstimateWithCI> expected_v;
  /// E V(x) (log log x)^0.51 / log x, with the interval scaled alongside.
  std::vector<EstimateWithCI> ratio;
  /// Fitted floor kappa: the smallest ratio point estimate over the grid.
  double kappa_floor = 0.0;
};
AveragedVSweep averaged_v_sweep(std::uint64_t seed, std::uint64_t samples, unsigned workers);

}  // namespace rmflab
