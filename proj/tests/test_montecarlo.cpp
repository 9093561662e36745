#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rmflab/analysis.hpp"
#include "rmflab/budget.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/montecarlo.hpp"
#include "rmflab/sieve.hpp"

using namespace rmflab;

namespace {

ExperimentPlan plan_for(ProcessSpec process, std::uint64_t samples, std::uint64_t seed) {
  ExperimentPlan p;
  p.process = process;
  p.samples = samples;
  p.master_seed = seed;
  return p;
}

ModelSpec iid() {
  ModelSpec m;
  m.kind = ModelKind::iid_rademacher;
  return m;
}

}  // namespace

TEST_CASE("second moment of M matches Q") {
  for (double x : {1000.0, 54321.0}) {
    const auto e = estimate_moment(plan_for(RmfSpec{}, 2000, 3), x, 2.0);
    const double q = static_cast<double>(squarefree_count(position_of(x)));
    CHECK(std::fabs(e.point - q) <= 4.0 * e.standard_error);
    CHECK(e.ci_lo <= e.point);
    CHECK(e.ci_hi >= e.point);
    CHECK(e.n_samples == 2000);
  }
}

TEST_CASE("first absolute moment of an iid walk matches enumeration") {
  const auto exact = oracle::enumerate_walks(20);
  const auto e = estimate_moment(plan_for(iid(), 4000, 8), 20.0, 1.0);
  CHECK(std::fabs(e.point - exact.mean_abs) <= 4.0 * e.standard_error);
}

TEST_CASE("zeroth moment is exactly one") {
  const auto e = estimate_moment(plan_for(RmfSpec{}, 10, 1), 500.0, 0.0);
  CHECK(e.point == 1.0);
}

TEST_CASE("sign change probability trivial cases") {
  // Empty integer range (a, b], as when e^N x < x + 1.
  const auto set = sample_traces(RmfSpec{}, 4, 50, {1000});
  const auto empty = sign_change_prob_estimate(set, 1000, 1000, 4);
  CHECK(empty.point == 0.0);
  CHECK(empty.ci_hi == 0.0);

  RmfSpec plus;
  plus.oracle = OracleKind::all_plus;
  const auto p = estimate_sign_change_prob(plan_for(plus, 20, 1), 100.0, 5);
  CHECK(p.point == 0.0);
}

TEST_CASE("sign change probability counts changes after the entering sign") {
  const auto set = sample_traces(iid(), 6, 300, {10, 40});
  const auto est = sign_change_prob_estimate(set, 10, 40, 6);
  const auto a = set.changes_up_to(10), b = set.changes_up_to(40);
  double hits = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) hits += b[i] > a[i] ? 1.0 : 0.0;
  CHECK(est.point == doctest::Approx(hits / 300.0).epsilon(1e-12));
}

TEST_CASE("expected V of an iid walk matches enumeration") {
  const auto exact = oracle::enumerate_walks(16);
  const auto e = estimate_expected_V(plan_for(iid(), 4000, 12), 16.0);
  CHECK(std::fabs(e.point - exact.mean_changes) <= 4.0 * e.standard_error);
  CHECK(estimate_expected_V(plan_for(RmfSpec{}, 30, 1), 1.0).point == 0.0);
}

TEST_CASE("expected V is nondecreasing in x") {
  const std::vector<std::uint64_t> cps{10, 100, 1000, 10'000, 100'000};
  const auto set = sample_traces(RmfSpec{}, 21, 200, cps);
  double prev = -1.0;
  for (auto u : cps) {
    const auto e = expected_v_estimate(set, u, 21);
    CHECK(e.point >= prev);
    prev = e.point;
  }
}

TEST_CASE("x_ell_grid examples") {
  const auto g = x_ell_grid(0.01, 60);
  REQUIRE(g.size() == 59);
  CHECK(g[0] == doctest::Approx(std::exp(2.0 * std::pow(std::log(2.0), 0.51))).epsilon(1e-12));
  CHECK(g[0] == doctest::Approx(5.25).epsilon(2e-3));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  for (int ell = 10; ell < 60; ++ell) {
    const double log_ratio = std::log(g[ell - 1]) - std::log(g[ell - 2]);
    const double target = std::pow(std::log(static_cast<double>(ell)), 0.51);
    CHECK(log_ratio <= 3.0 * target);
    CHECK(log_ratio >= target / 3.0);
  }
  CHECK_THROWS_AS(x_ell_grid(0.0, 10), ParameterError);
  CHECK_THROWS_AS(x_ell_grid(0.5, 10), ParameterError);
  CHECK_THROWS_AS(x_ell_grid(0.01, 1), ParameterError);
}

TEST_CASE("event probabilities") {
  const auto one = estimate_event_probs(plan_for(RmfSpec{}, 100, 2), 1000.0, 1, 0.1, 0.1);
  CHECK_FALSE(one.p_change_given_ab.defined());
  CHECK(one.n_forced == 0);

  const auto small = estimate_event_probs(plan_for(RmfSpec{}, 400, 2), 100.0, 5, 0.3, 0.5);
  CHECK(small.implication_holds);
  CHECK(small.p_a.defined());
  CHECK(small.p_b.defined());
}

TEST_CASE("B holds with high probability at x = 1e4, N = 10") {
  const auto e = estimate_event_probs(plan_for(RmfSpec{}, 128, 17), 1e4, 10, 0.1, 0.1);
  CHECK(e.p_b.point >= 0.9);
  CHECK(e.implication_holds);
}

TEST_CASE("correlation estimates") {
  const auto plan = plan_for(RmfSpec{}, 2000, 19);
  const auto r12 = estimate_correlation(plan, 1000.0, 1, 2);
  CHECK(std::fabs(r12.point - exact_correlation(1000.0, 1, 2)) <= 4.0 * r12.standard_error);
  const auto r16 = estimate_correlation(plan, 1000.0, 1, 6);
  CHECK(std::fabs(r16.point) <= 2.0 * std::exp(-2.5) + 4.0 * r16.standard_error);
  CHECK(estimate_correlation(plan, 1000.0, 3, 3).point == 1.0);
}

TEST_CASE("results do not depend on the worker count") {
  const std::vector<std::uint64_t> cps{100, 5000, 70'000};
  for (ProcessSpec p : {ProcessSpec{RmfSpec{}}, ProcessSpec{iid()}}) {
    const auto one = sample_traces(p, 33, 150, cps, 1);
    const auto three = sample_traces(p, 33, 150, cps, 3);
    CHECK(one == three);
    CHECK(expected_v_estimate(one, 70'000, 33) == expected_v_estimate(three, 70'000, 33));
  }
  auto plan = plan_for(RmfSpec{}, 300, 5);
  const auto a = estimate_moment(plan, 2e4, 1.0);
  plan.workers = 4;
  CHECK(estimate_moment(plan, 2e4, 1.0) == a);
}

TEST_CASE("bootstrap interval width shrinks like samples^-1/2") {
  const auto set = sample_traces(RmfSpec{}, 40, 4000, {5000});
  double prev_width = 0.0;
  for (std::uint64_t n : {250ULL, 1000ULL, 4000ULL}) {
    TraceSet sub;
    sub.checkpoints = set.checkpoints;
    sub.traces.assign(set.traces.begin(), set.traces.begin() + static_cast<std::ptrdiff_t>(n));
    const auto e = moment_estimate(sub, 5000, 1.0, 40);
    const double width = e.ci_hi - e.ci_lo;
    if (prev_width > 0.0) {
      // 4x the samples should halve the width; allow a factor 2 either way.
      const double ratio = prev_width / width;
      CHECK(ratio >= 1.0);
      CHECK(ratio <= 4.0);
    }
    prev_width = width;
  }
}

TEST_CASE("plan validation and budget refusal") {
  auto p = plan_for(RmfSpec{}, 0, 1);
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.samples = 10;
  p.workers = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.workers = 1;
  p.delta = 1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.delta = 0.1;
  p.x_grid = {100.0, 10.0};
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.x_grid = {10.0, 100.0};
  CHECK_NOTHROW(p.validate());

  CHECK_THROWS_AS(estimate_moment(plan_for(RmfSpec{}, 1, 1), 2.0 * static_cast<double>(kDefaultStepBudget), 1.0),
                  ResourceError);
  CHECK_THROWS_AS(position_of(0.5), ParameterError);
}

TEST_CASE("regime flags") {
  CHECK(regime_flags(1e100, 10).n_small);
  CHECK_FALSE(regime_flags(1e3, 10).n_small);
  CHECK(regime_flags(1e3, 10).loglog_small);
  CHECK(regime_flags(2.0, 1).loglog_small);
}
