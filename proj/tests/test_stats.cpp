#include <doctest.h>

#include <cmath>

#include "polling/rng.hpp"
#include "polling/stats.hpp"

using namespace polling;

TEST_CASE("constant samples have scv zero") {
  std::vector<Moments> reps(4);
  for (auto& r : reps)
    for (int i = 0; i < 100; ++i) r.add(2.5);
  const Estimate est = estimate_scv(reps);
  CHECK(est.defined);
  CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scv of a large exponential sample is close to one") {
  RngStream rng(99, 0, 0);
  std::vector<Moments> reps(10);
  for (auto& r : reps)
    for (int i = 0; i < 100000; ++i) r.add(-std::log(rng.uniform()));
  const Estimate est = estimate_scv(reps);
  CHECK(est.defined);
  CHECK(est.value > 0.98);
  CHECK(est.value < 1.02);
  // The jackknife interval should cover the truth here.
  CHECK(std::abs(est.value - 1.0) < 3.0 * est.ci_half_width);
}

TEST_CASE("scv of uniform samples approaches 1/3") {
  RngStream rng(7, 1, 0);
  std::vector<Moments> reps(8);
  for (auto& r : reps)
    for (int i = 0; i < 100000; ++i) r.add(rng.uniform());
  const Estimate est = estimate_scv(reps);
  CHECK(est.value == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("scv is undefined at zero mean") {
  std::vector<Moments> reps(3);
  for (auto& r : reps)
    for (int i = 0; i < 10; ++i) r.add(0.0);
  CHECK_FALSE(estimate_scv(reps).defined);
}

TEST_CASE("mean estimate pools replications and covers the truth") {
  RngStream rng(5, 0, 0);
  std::vector<Moments> reps(20);
  for (auto& r : reps)
    for (int i = 0; i < 2000; ++i) r.add(rng.uniform());
  const Estimate est = estimate_mean(reps);
  CHECK(est.value == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(est.value - 0.5) < 3.0 * est.ci_half_width);
}

TEST_CASE("t critical values") {
  CHECK(t_critical_975(1) == doctest::Approx(12.706));
  CHECK(t_critical_975(10) == doctest::Approx(2.228));
  CHECK(t_critical_975(40) == doctest::Approx(2.021));
  CHECK(t_critical_975(100) == doctest::Approx(1.984).epsilon(1e-3));
  CHECK(t_critical_975(100000) == doctest::Approx(1.96).epsilon(1e-3));
}

TEST_CASE("KS statistic of a perfect grid is 1/(2n)-ish and of a shifted law large") {
  std::vector<double> grid;
  const int n = 1000;
  for (int i = 0; i < n; ++i) grid.push_back((i + 0.5) / n);
  const auto uniform_cdf = [](double x) { return x < 0 ? 0.0 : x > 1 ? 1.0 : x; };
  CHECK(ks_statistic(grid, uniform_cdf) == doctest::Approx(0.5 / n).epsilon(1e-9));

  std::vector<double> shifted;
  for (int i = 0; i < n; ++i) shifted.push_back(0.5 + 0.5 * (i + 0.5) / n);
  CHECK(ks_statistic(shifted, uniform_cdf) > 0.45);
}

TEST_CASE("moments subtraction supports leave-one-out") {
  Moments a;
  for (int i = 1; i <= 10; ++i) a.add(i);
  Moments b;
  for (int i = 1; i <= 5; ++i) b.add(i);
  const Moments rest = a - b;
  CHECK(rest.count == 5);
  CHECK(rest.mean() == doctest::Approx(8.0));
}
