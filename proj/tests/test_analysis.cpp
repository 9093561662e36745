#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rmflab/analysis.hpp"
#include "rmflab/errors.hpp"
#include "rmflab/rmf.hpp"

using namespace rmflab;

namespace {

// Plain double sum of the defining series, no compensation or log1p.
double lambda_direct(int N, double x, double q) {
  double s = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double ll = std::log(std::log(std::exp(n) * x));
    s += std::pow(1.0 + (1.0 - q / 2.0) * std::sqrt(ll), -q / 2.0);
  }
  return s;
}

std::uint64_t brute_q(std::uint64_t x) {
  std::uint64_t c = 0;
  for (std::uint64_t n = 1; n <= x; ++n) c += oracle::trial_squarefree(n) ? 1 : 0;
  return c;
}

CheckpointGrid grid_of(std::vector<double> y) {
  CheckpointGrid g;
  g.x = 1000.0;
  g.N = static_cast<int>(y.size());
  g.y = std::move(y);
  for (double v : g.y) {
    g.s_n += v;
    g.s_n_star += std::fabs(v);
  }
  return g;
}

}  // namespace

TEST_CASE("lambda_exact examples") {
  for (double x : {3.0, 1e10, 1e100}) {
    for (int N : {1, 7, 100}) CHECK(lambda_exact(LambdaParams::from_x(N, x, 2.0)) == N);
  }
  const double ee = std::exp(std::numbers::e);
  CHECK(lambda_exact(LambdaParams::from_x(1, ee, 1.0)) == doctest::Approx(0.7973).epsilon(1e-4));
  CHECK(lambda_exact(LambdaParams::from_x(1, ee, 1.0)) ==
        doctest::Approx(std::pow(1.0 + 0.5 * std::sqrt(std::log(std::numbers::e + 1.0)), -0.5)).epsilon(1e-12));
  for (double q : {1.0, 1.3, 1.9}) {
    const auto one = lambda_exact(LambdaParams::from_x(1, 1e5, q));
    const auto two = lambda_exact(LambdaParams::from_x(2, 1e5, q));
    CHECK(two == doctest::Approx(one + lambda_direct(2, 1e5, q) - lambda_direct(1, 1e5, q)).epsilon(1e-12));
    CHECK(lambda_exact(LambdaParams::from_x(30, 1e8, q)) == doctest::Approx(lambda_direct(30, 1e8, q)).epsilon(1e-12));
  }
}

TEST_CASE("lambda_exact monotonicity") {
  for (double q : {1.0, 1.5, 1.99}) {
    double prev = 0.0;
    for (int N = 1; N <= 50; ++N) {
      const double v = lambda_exact(LambdaParams::from_log_log(N, 3.0, q));
      CHECK(v > prev);
      prev = v;
    }
    prev = 1e300;
    for (double ll = 0.5; ll < 1e4; ll *= 2.0) {
      const double v = lambda_exact(LambdaParams::from_log_log(10, ll, q));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("lambda parameter checks") {
  CHECK_THROWS_AS(LambdaParams::from_x(1, 2.0, 1.0), ParameterError);
  CHECK_THROWS_AS(LambdaParams::from_x(0, 100.0, 1.0), ParameterError);
  CHECK_THROWS_AS(LambdaParams::from_x(1, 100.0, 0.5), ParameterError);
  CHECK_THROWS_AS(LambdaParams::from_x(1, 100.0, 2.5), ParameterError);
  CHECK_THROWS_AS(lambda_asymptotic(LambdaParams::from_x(1, 100.0, 1.95)), ParameterError);
}

TEST_CASE("lambda_asymptotic examples") {
  CHECK(lambda_asymptotic(LambdaParams::from_log_log(100, 16.0, 1.0)) ==
        doctest::Approx(100.0 / (std::sqrt(0.5) * 2.0)).epsilon(1e-12));
  CHECK(lambda_asymptotic(LambdaParams::from_log_log(100, 16.0, 1.0)) == doctest::Approx(70.71).epsilon(1e-4));
  // The asymptotic form approaches the exact sum as log log x grows.
  for (double q : {1.0, 1.5}) {
    double prev = 1.0;
    for (double ll : {10.0, 100.0, 1e3, 1e4, 1e5}) {
      const auto p = LambdaParams::from_log_log(10'000, ll, q);
      const double rel = std::fabs(lambda_exact(p) - lambda_asymptotic(p)) / lambda_exact(p);
      CHECK(rel < prev);
      prev = rel;
    }
  }
}

TEST_CASE("lambda_exact handles enormous x") {
  const auto p = LambdaParams::from_log_log(10'000, 1e4, 1.0);
  const double per_term = std::pow(1.0 + 0.5 * std::sqrt(1e4), -0.5);
  CHECK(lambda_exact(p) == doctest::Approx(1e4 * per_term).epsilon(1e-10));
}

TEST_CASE("harper_predictor examples") {
  for (double x : {16.0, 1e6, 1e20}) CHECK(harper_predictor(x, 2.0) == doctest::Approx(x).epsilon(1e-12));
  const double x = std::exp(std::exp(4.0));
  CHECK(harper_predictor(x, 1.0) == doctest::Approx(std::sqrt(x / 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(harper_predictor(10.0, 1.0), ParameterError);
  CHECK_THROWS_AS(harper_predictor(1e6, 2.5), ParameterError);
  // Larger deficit term, smaller prediction: compare q via the deficit.
  const double base = 1e8;
  double prev = 1e300;
  for (double q : {1.9, 1.6, 1.3, 1.0}) {
    const double deficit = (1.0 - q / 2.0) * std::sqrt(std::log(std::log(base)));
    const double normalized = std::pow(harper_predictor(base, q), 2.0 / q) / base;
    CHECK(normalized == doctest::Approx(1.0 / (1.0 + deficit)).epsilon(1e-12));
    CHECK(normalized < prev);
    prev = normalized;
  }
}

TEST_CASE("count_sign_changes examples") {
  CHECK(count_sign_changes(std::vector<double>{1, -2, 3}).count == 2);
  const auto zs = count_sign_changes(std::vector<double>{1, 0, -1, 0, 1});
  CHECK(zs.count == 2);
  CHECK(zs.positions == std::vector<std::size_t>{2, 4});
  CHECK(zs.zero_runs == 2);
  CHECK(count_sign_changes(std::vector<double>{5, 3, 2}).count == 0);
  CHECK(count_sign_changes(std::vector<double>{0, 0, 0}).count == 0);
  CHECK(count_sign_changes(std::vector<double>{0, 0, 0}).zero_runs == 1);
}

TEST_CASE("count_sign_changes invariances on random walks") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> step(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(60);
    double m = 0.0;
    for (auto& x : v) x = (m += step(rng));
    const auto base = count_sign_changes(v).count;
    CHECK(base == oracle::naive_sign_changes(v));
    std::vector<double> neg(v), scaled(v);
    for (auto& x : neg) x = -x;
    for (auto& x : scaled) x *= 3.5;
    CHECK(count_sign_changes(neg).count == base);
    CHECK(count_sign_changes(scaled).count == base);
  }
}

TEST_CASE("exact_cross_moment examples") {
  CHECK(exact_cross_moment(10, 10) == 7.0);
  CHECK(exact_cross_moment(10, 1'000'000) == 7.0);
  CHECK(exact_cross_moment(1'000'000, 10) == 7.0);
  for (std::uint64_t b : {1ULL, 2ULL, 999ULL}) CHECK(exact_cross_moment(1, b) == 1.0);
  CHECK_THROWS_AS(exact_cross_moment(0, 5), ParameterError);
}

TEST_CASE("exact_correlation against a brute-force Q") {
  const double x = 100.0;
  const double q1 = static_cast<double>(brute_q(271));
  const double q2 = static_cast<double>(brute_q(738));
  REQUIRE(static_cast<std::uint64_t>(std::floor(std::exp(1.0) * x)) == 271);
  const double e1 = std::exp(1.0) * x, e2 = std::exp(2.0) * x;
  const double cross = q1 / (std::exp(1.5) * x);
  const double mean = 1.0 / std::sqrt(e1 * e2);
  const double s1 = std::sqrt(q1 / e1 - 1.0 / e1);
  const double s2 = std::sqrt(q2 / e2 - 1.0 / e2);
  CHECK(exact_correlation(x, 1, 2) == doctest::Approx((cross - mean) / (s1 * s2)).epsilon(1e-12));
  CHECK(exact_correlation(x, 3, 3) == 1.0);
  CHECK_THROWS_AS(exact_correlation(x, 2, 1), ParameterError);
  CHECK_THROWS_AS(exact_correlation(1e10, 1, 30), ResourceError);
}

TEST_CASE("exact_correlation decays like exp(-(m-n)/2)") {
  double worst = 0.0;
  for (double x : {1e3, 1e4, 1e5, 1e6}) {
    for (int n = 1; n <= 10; ++n) {
      for (int m = n + 1; m <= 10; ++m) {
        const double scaled = std::fabs(exact_correlation(x, n, m)) * std::exp(0.5 * (m - n));
        worst = std::max(worst, scaled);
        if (x == 1e6) {
          CHECK(scaled >= 0.3);
          CHECK(scaled <= 1.2);
        }
      }
    }
  }
  CHECK(worst <= 2.0);
}

TEST_CASE("chebyshev_tail_bound examples") {
  for (double x : {1e3, 1e4, 1e5}) {
    for (int N = 1; N <= 10; ++N) CHECK(exact_second_moment_sum(N, x) <= 3.0 * N);
  }
  CHECK(chebyshev_tail_bound(5, 1e6, 1e3) < 1e-10);
  for (double lambda : {0.5, 1.0, 4.0}) {
    CHECK(chebyshev_tail_bound(1, lambda, 1e3) <= 1.0 / (lambda * lambda));
    CHECK(chebyshev_tail_bound(1, lambda, 1e3) == doctest::Approx(exact_cross_y(1e3, 1, 1) / (lambda * lambda)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(chebyshev_tail_bound(1, 0.0, 1e3), ParameterError);
}

TEST_CASE("event_indicators examples") {
  const auto flat = event_indicators(grid_of({50, 50, 50, 50}), 0.1, 0.1);
  CHECK(flat.a);
  CHECK_FALSE(flat.b);
  CHECK_FALSE(flat.sign_change);
  CHECK_THROWS_AS(event_indicators(grid_of({1, 2}), 0.0, 0.1), ParameterError);
  CHECK_THROWS_AS(event_indicators(grid_of({1, 2}), 0.1, 1.0), ParameterError);
  CHECK_THROWS_AS(event_indicators(grid_of({1, 2}), 0.1, 0.0), ParameterError);
}

TEST_CASE("A and B with forcing geometry imply a sign change") {
  // Exhaustive sign patterns and magnitudes for N <= 4, with thresholds
  // where lambda^(1 - delta) < epsilon * lambda.
  const std::vector<double> magnitudes{0.0, 0.05, 0.3, 1.0, 2.5};
  int forced = 0;
  for (int N = 1; N <= 4; ++N) {
    const int combos = static_cast<int>(std::pow(magnitudes.size() * 2, N));
    for (int c = 0; c < combos; ++c) {
      std::vector<double> y;
      int k = c;
      for (int i = 0; i < N; ++i) {
        const int d = k % static_cast<int>(magnitudes.size() * 2);
        k /= static_cast<int>(magnitudes.size() * 2);
        y.push_back((d % 2 ? -1.0 : 1.0) * magnitudes[d / 2]);
      }
      const auto out = event_indicators(grid_of(y), 0.9, 0.95);
      if (out.a && out.b && out.geometry_forces_change) {
        ++forced;
        CHECK(out.sign_change);
      }
    }
  }
  CHECK(forced > 0);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<double> y(12);
    for (auto& v : y) v = gauss(rng);
    const auto out = event_indicators(grid_of(y), 0.5, 0.9);
    if (out.a && out.b && out.geometry_forces_change) CHECK(out.sign_change);
  }
}
