#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "rmflab/budget.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/rmf.hpp"
#include "rmflab/sieve.hpp"

using namespace rmflab;

TEST_CASE("sign_of_prime is deterministic and has test hooks") {
  const auto a = SignOracle::pseudorandom(42, 7);
  const auto b = SignOracle::pseudorandom(42, 7);
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 1'000'003ULL}) {
    CHECK(sign_of_prime(a, p) == sign_of_prime(b, p));
    CHECK(std::abs(sign_of_prime(a, p)) == 1);
    CHECK(sign_of_prime(SignOracle::all_plus(), p) == 1);
    CHECK(sign_of_prime(SignOracle::all_minus(), p) == -1);
  }
  CHECK_THROWS_AS(sign_of_prime(a, 4), ParameterError);
  CHECK_THROWS_AS(sign_of_prime(a, 1), ParameterError);
}

TEST_CASE("signs over the first 1e5 primes are balanced") {
  const auto primes = primes_up_to(1'299'709);  // the 100000th prime
  REQUIRE(primes.size() == 100'000);
  for (std::uint64_t sample : {0ULL, 1ULL, 63ULL, 64ULL, 1000ULL}) {
    const auto o = SignOracle::pseudorandom(2024, sample);
    long sum = 0;
    for (auto p : primes.primes()) sum += o.sign(p);
    CHECK(std::fabs(static_cast<double>(sum) / 1e5) <= 0.016);
  }
}

TEST_CASE("different samples give different sign patterns") {
  const auto a = SignOracle::pseudorandom(9, 0);
  const auto b = SignOracle::pseudorandom(9, 1);
  const auto c = SignOracle::pseudorandom(10, 0);
  int diff_ab = 0, diff_ac = 0;
  for (auto p : primes_up_to(1000).primes()) {
    diff_ab += a.sign(p) != b.sign(p);
    diff_ac += a.sign(p) != c.sign(p);
  }
  CHECK(diff_ab > 40);
  CHECK(diff_ac > 40);
}

TEST_CASE("f_value examples") {
  const auto primes = primes_up_to(100);
  const auto seg = factor_segment(1, 100, primes);
  const auto o = SignOracle::pseudorandom(5, 3);
  CHECK(f_value(o, 1, seg) == 1);
  CHECK(f_value(o, 4, seg) == 0);
  CHECK(f_value(o, 6, seg) == o.sign(2) * o.sign(3));
  for (std::uint64_t n = 1; n < 100; ++n) CHECK(f_value(o, n, seg) == oracle::trial_f(o, n));
}

TEST_CASE("rmf_trace examples") {
  CHECK(rmf_trace(SignOracle::all_plus(), 10).final_value == 7.0);
  CHECK(rmf_trace(SignOracle::pseudorandom(1, 0), 1).final_value == 1.0);
  CHECK(rmf_trace(SignOracle::all_minus(), 1).final_value == 1.0);
  CHECK_THROWS_AS(rmf_trace(SignOracle::all_plus(), 10, std::vector<std::uint64_t>{11}), ParameterError);
  CHECK_THROWS_AS(rmf_trace(SignOracle::all_plus(), 10, std::vector<std::uint64_t>{0}), ParameterError);
}

TEST_CASE("rmf_trace to 1e3 matches trial-division f") {
  std::vector<std::uint64_t> every(1000);
  std::iota(every.begin(), every.end(), 1);
  for (std::uint64_t sample : {0ULL, 17ULL, 99ULL}) {
    const auto o = SignOracle::pseudorandom(777, sample);
    const auto trace = rmf_trace(o, 1000, every);
    long m = 0;
    std::vector<double> walk;
    for (std::uint64_t n = 1; n <= 1000; ++n) {
      m += oracle::trial_f(o, n);
      walk.push_back(static_cast<double>(m));
      REQUIRE(trace.checkpoint_values[n - 1] == static_cast<double>(m));
      REQUIRE(std::fabs(trace.checkpoint_values[n - 1]) <= static_cast<double>(n));
    }
    CHECK(trace.final_value == static_cast<double>(m));
    CHECK(trace.sign_change_count == oracle::naive_sign_changes(walk));
  }
}

TEST_CASE("batched traces equal the scalar reference") {
  const std::vector<std::uint64_t> cps{1, 2, 3, 97, 65'536, 65'537, 300'000, 299'999};
  const std::uint64_t x = 300'000;
  // A range straddling a 64-lane block boundary, starting mid-block.
  const auto batch = rmf_trace_samples(OracleKind::pseudorandom, 31, 60, 10, x, cps);
  REQUIRE(batch.size() == 10);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto ref = rmf_trace(SignOracle::pseudorandom(31, 60 + i), x, cps);
    CHECK(batch[i] == ref);
  }
  const auto plus = rmf_trace_samples(OracleKind::all_plus, 0, 0, 1, 1000, std::vector<std::uint64_t>{1000});
  CHECK(plus[0].final_value == static_cast<double>(squarefree_count(1000)));
  CHECK(plus[0].sign_change_count == 0);
}

TEST_CASE("checkpoint_grid examples") {
  const double x = 50.0;
  const auto plus = checkpoint_grid(SignOracle::all_plus(), x, 4);
  REQUIRE(plus.y.size() == 4);
  for (int n = 1; n <= 4; ++n) {
    const double scale = std::exp(static_cast<double>(n)) * x;
    const auto u = static_cast<std::uint64_t>(std::floor(scale));
    CHECK(plus.y[n - 1] == doctest::Approx(static_cast<double>(squarefree_count(u)) / std::sqrt(scale)).epsilon(1e-12));
    CHECK(plus.y[n - 1] == doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi) * std::sqrt(scale)).epsilon(0.15));
  }

  const auto o = SignOracle::pseudorandom(8, 2);
  const auto one = checkpoint_grid(o, 2.0, 1);
  CHECK(one.y[0] == doctest::Approx(rmf_trace(o, 5).final_value / std::sqrt(2.0 * std::numbers::e)).epsilon(1e-12));

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = checkpoint_grid(SignOracle::pseudorandom(8, s), 100.0, 6);
    CHECK(g.s_n_star >= std::fabs(g.s_n));
    CHECK(g.s_n == doctest::Approx(std::accumulate(g.y.begin(), g.y.end(), 0.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(checkpoint_grid(o, 1.5, 1), ParameterError);
  CHECK_THROWS_AS(checkpoint_grid(o, 10.0, 0), ParameterError);
}

TEST_CASE("checkpoint_grid refuses traces beyond the budget") {
  setenv("RMFLAB_BUDGET", "1000", 1);
  const auto o = SignOracle::pseudorandom(1, 0);
  bool thrown = false;
  try {
    checkpoint_grid(o, 100.0, 3);
  } catch (const ResourceError& e) {
    thrown = true;
    CHECK(e.required() == static_cast<std::uint64_t>(std::floor(std::exp(3.0) * 100.0)));
  }
  CHECK(thrown);
  unsetenv("RMFLAB_BUDGET");
  CHECK(step_budget() == kDefaultStepBudget);
  CHECK_NOTHROW(checkpoint_grid(o, 100.0, 3));
}

TEST_CASE("normalized second moment of Y_n lies in [3/pi^2, 1]") {
  for (double x : {100.0, 1000.0, 12345.0}) {
    for (int n = 1; n <= 6; ++n) {
      const double scale = std::exp(static_cast<double>(n)) * x;
      const auto u = static_cast<std::uint64_t>(std::floor(scale));
      const double v = static_cast<double>(squarefree_count(u)) / scale;
      CHECK(v >= 3.0 / (std::numbers::pi * std::numbers::pi));
      CHECK(v <= 1.0);
    }
  }
}
