#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ocdesign/math.hpp"
#include "oracles.hpp"

using namespace ocdesign;

TEST_CASE("logit hits the book values") {
  CHECK(logit(0.5, 1e-12) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(logit(0.9, 1e-12) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  // clamp engages at p = 1 (27.6310...; the clamp point 1 - 1e-12 is itself
  // rounded in binary, so agreement is to ~1e-5)
  CHECK(logit(1.0, 1e-12) ==
        doctest::Approx(std::log((1.0 - 1e-12) / 1e-12)).epsilon(1e-5));
  CHECK(logit(1.0, 1e-12) == doctest::Approx(27.6310).epsilon(1e-4));
  CHECK_THROWS_AS(logit(0.5, 0.0), ConfigError);
  CHECK_THROWS_AS(logit(0.5, 0.7), ConfigError);
}

TEST_CASE("inv_logit basics and antisymmetry") {
  CHECK(inv_logit(0.0) == doctest::Approx(0.5));
  CHECK(inv_logit(std::log(9.0)) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(inv_logit(-std::log(9.0)) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("logit round trip across the domain") {
  for (double p = 1e-9; p < 1.0 - 1e-9; p += 0.0077) {
    CHECK(std::fabs(inv_logit(logit(p, 1e-12)) - p) < 1e-9);
  }
  for (double p : {1e-9, 1e-7, 0.5, 1.0 - 1e-7, 1.0 - 1e-9}) {
    CHECK(std::fabs(inv_logit(logit(p, 1e-12)) - p) < 1e-9);
  }
}

TEST_CASE("order statistic examples") {
  std::vector<double> v{0.3, 0.1, 0.5};
  CHECK(xi(1, v) == 0.1);
  CHECK(xi(3, v) == 0.5);
  std::vector<double> ties{0.7, 0.7, 0.2};
  CHECK(xi(2, ties) == 0.7);
  CHECK_THROWS_AS(xi(0, v), ArgumentError);
  CHECK_THROWS_AS(xi(4, v), ArgumentError);
}

TEST_CASE("order statistic matches full sort on random input") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int size = 1 + static_cast<int>(gen() % 400);
    std::vector<double> v(size);
    for (double& x : v) x = unif(gen);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const int a = 1 + static_cast<int>(gen() % size);
    CHECK(xi(a, v) == sorted[a - 1]);
  }
  // one large case
  std::vector<double> big(100000);
  for (double& x : big) x = unif(gen);
  std::vector<double> sorted = big;
  std::sort(sorted.begin(), sorted.end());
  CHECK(xi(77777, big) == sorted[77776]);
}

TEST_CASE("standard normal cdf and quantile") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(2.0) == doctest::Approx(0.9772499).epsilon(1e-7));
  CHECK(std_normal_quantile(0.975) ==
        doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(std_normal_quantile(0.95) ==
        doctest::Approx(1.6448536269514722).epsilon(1e-10));
  CHECK_THROWS_AS(std_normal_quantile(0.0), ArgumentError);
  CHECK_THROWS_AS(std_normal_quantile(1.0), ArgumentError);

  // functional inverse to 1e-8 wherever the cdf value is representable; the
  // upper tail beyond x ~ 5 saturates double precision near 1, so the
  // matching check there runs through the lower tail by symmetry.
  for (double x = -8.0; x <= 5.0; x += 0.23) {
    CHECK(std::fabs(std_normal_quantile(std_normal_cdf(x)) - x) < 1e-8);
  }
  for (double x = 5.0; x <= 8.0; x += 0.23) {
    const double p_tail = std_normal_cdf(-x);
    CHECK(std::fabs(-std_normal_quantile(p_tail) - x) < 1e-8);
  }
  // p-space inverse property across the whole domain
  for (double p = 1e-12; p < 1.0; p = p * 1.7 + 1e-4) {
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <=
          1e-15 + 4e-16 * p);
  }
  // quadrature oracle for the cdf itself
  for (double x : {-3.0, -1.2, 0.4, 2.5}) {
    const double numeric =
        0.5 + oracles::integrate(
                  [](double t) {
                    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
                  },
                  0.0, x);
    CHECK(std::fabs(std_normal_cdf(x) - numeric) < 1e-10);
  }
}

TEST_CASE("log normal cdf deep in the tail") {
  for (double x = -1.0; x >= -30.0; x -= 1.3) {
    const double direct = std::log(std_normal_cdf(x));
    CHECK(std_normal_log_cdf(x) == doctest::Approx(direct).epsilon(1e-11));
  }
  // far beyond double underflow of Phi itself
  const double x = -4000.0;
  const double expected = -0.5 * x * x - std::log(-x) -
                          0.5 * std::log(2.0 * M_PI);  // leading order
  CHECK(std_normal_log_cdf(x) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("student t cdf") {
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-14));
  // numerical integration of the t density as the oracle
  const double dof = 5.0;
  const double oracle =
      0.5 + oracles::integrate(
                [dof](double t) { return oracles::t_density(t, dof); }, 0.0,
                2.015);
  CHECK(student_t_cdf(2.015, dof) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(student_t_cdf(2.015, 5.0) == doctest::Approx(0.95).epsilon(1e-3));
  // convergence to the normal for large dof
  CHECK(std::fabs(student_t_cdf(1.5, 1e6) - std_normal_cdf(1.5)) < 1e-4);
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), ArgumentError);
}

TEST_CASE("guarded floor and ceil snap near-integers") {
  CHECK(guarded_floor(1e4 * 0.2) == 2000);
  CHECK(guarded_ceil(1e4 * 0.95) == 9500);
  CHECK(guarded_floor(2.5) == 2);
  CHECK(guarded_ceil(2.5) == 3);
  CHECK(guarded_floor(-1.5) == -2);
  CHECK(guarded_ceil(-1.5) == -1);
  CHECK(guarded_floor(3.0000000001) == 3);
  CHECK(guarded_ceil(2.9999999999) == 3);
}
