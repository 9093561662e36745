// Recomputes the values pinned in include/rmflab/pilot.hpp and reports
// whether the header still matches. Run once before acceptance; paste the
// printed block into the header if the pilot definition changes.

#include <cmath>
#include <cstdio>

#include "rmflab/acceptance.hpp"
#include "rmflab/pilot.hpp"
#include "rmflab/sieve.hpp"

using namespace rmflab;

int main() {
  const auto sweep = sign_prob_sweep(pilot::kPilotSeed, 1000, 1);
  double theta = 1.0;
  for (std::size_t i = 0; i < sweep.x.size(); ++i) {
    const double p = sweep.p[i].point;
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(sweep.p[i].n_samples));
    std::printf("signprob x=%g: %.4f [%.4f, %.4f], binomial SE %.4f\n", sweep.x[i], p, sweep.p[i].ci_lo,
                sweep.p[i].ci_hi, se);
    theta = std::min(theta, p - 4.0 * se);
  }
  theta = std::floor(theta * 100.0) / 100.0;

  const auto avg = averaged_v_sweep(pilot::kPilotSeed, 1000, 1);
  for (std::size_t i = 0; i < avg.x.size(); ++i) {
    std::printf("avg-v x=%.6g: E V %.4f, ratio %.5f [%.5f, %.5f]\n", avg.x[i], avg.expected_v[i].point,
                avg.ratio[i].point, avg.ratio[i].ci_lo, avg.ratio[i].ci_hi);
  }
  // Three significant digits are plenty for a floor at half the fit.
  char kappa_text[32];
  std::snprintf(kappa_text, sizeof kappa_text, "%.3g", avg.kappa_floor);
  const double kappa = std::atof(kappa_text);

  const auto mertens = mertens_trace(pilot::kMertensLimit);

  std::printf("\ninline constexpr double kSignChangeTheta = %.2f;\n", theta);
  std::printf("inline constexpr double kAveragedVKappa = %s;\n", kappa_text);
  std::printf("inline constexpr std::int64_t kMertensFinal = %.0f;\n", mertens.final_value);
  std::printf("inline constexpr std::uint64_t kMertensSignChanges = %llu;\n",
              static_cast<unsigned long long>(mertens.sign_change_count));

  const bool match = theta == pilot::kSignChangeTheta && kappa == pilot::kAveragedVKappa &&
                     mertens.final_value == static_cast<double>(pilot::kMertensFinal) &&
                     mertens.sign_change_count == pilot::kMertensSignChanges;
  std::printf("\npilot.hpp %s\n", match ? "matches" : "is OUT OF DATE");
  return match ? 0 : 1;
}
