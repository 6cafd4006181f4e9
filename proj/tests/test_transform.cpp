#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "qsol/errors.hpp"
#include "qsol/transform.hpp"

using namespace qsol;

namespace {
const TransformCalculus& tc = default_transform();
}

TEST_CASE("h closed form values") {
  CHECK(tc.h(0.0) == 0.0);
  // 1/sqrt(2) + asinh(1)/2
  CHECK(tc.h(1.0) == doctest::Approx(1.147793574696319).epsilon(1e-15));
  CHECK(tc.h(-1.0) == -tc.h(1.0));
  for (double u : {1e-8, 0.3, 7.0, 1e3, 1e7}) CHECK(tc.h(-u) == -tc.h(u));
}

TEST_CASE("f inverts h") {
  CHECK(tc.f(0.0) == 0.0);
  CHECK(std::fabs(tc.f(1.147793574696319) - 1.0) <= 1e-12);
  const double u = tc.f(1e6);
  CHECK(std::fabs(tc.h(u) - 1e6) <= tc.newton_tol() * (1.0 + 1e6));
  CHECK(u == doctest::Approx(std::sqrt(2e6)).epsilon(1e-2));
  CHECK(u < std::sqrt(2e6));
}

TEST_CASE("round trip on 1e4 samples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = U(rng);
    worst = std::max(worst, std::fabs(tc.f(tc.h(u)) - u) / (1.0 + std::fabs(u)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("residual contract of f") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> E(-12.0, 12.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, E(rng));
    CHECK(std::fabs(tc.h(tc.f(v)) - v) <= tc.newton_tol() * (1.0 + std::fabs(v)));
  }
}

TEST_CASE("derivative identities") {
  CHECK(tc.f_prime(0.0) == 1.0);
  CHECK(tc.L_second(0.0) == 2.0);
  CHECK(std::fabs(tc.L(1.147793574696319) - 1.0) <= 1e-12);
  for (double v : {-300.0, -2.0, -1e-3, 0.0, 0.5, 3.0, 1e4, 1e8}) {
    const double u = tc.f(v);
    CHECK(std::fabs(tc.f_prime(v) * std::sqrt(1.0 + u * u) - 1.0) <= 1e-12);
    CHECK(tc.L(v) == doctest::Approx(u * u).epsilon(1e-15));
    CHECK(tc.L_prime(v) == doctest::Approx(2.0 * u * tc.f_prime(v)).epsilon(1e-14));
    CHECK(tc.L_second(v) == doctest::Approx(2.0 / ((1.0 + u * u) * (1.0 + u * u))).epsilon(1e-14));
    CHECK(tc.L_second(v) > 0.0);
  }
}

TEST_CASE("derivatives match centered differences") {
  for (double u : {-50.0, -1.0, 0.0, 0.2, 3.0, 40.0}) {
    const double d = 1e-6 * (1.0 + std::fabs(u));
    const double fd = (tc.h(u + d) - tc.h(u - d)) / (2.0 * d);
    CHECK(fd == doctest::Approx(std::sqrt(1.0 + u * u)).epsilon(1e-6));
  }
  for (double v : {-20.0, -0.5, 0.1, 2.0, 30.0}) {
    const double d = 1e-5 * (1.0 + std::fabs(v));
    CHECK((tc.f(v + d) - tc.f(v - d)) / (2 * d) == doctest::Approx(tc.f_prime(v)).epsilon(1e-6));
    CHECK((tc.L(v + d) - tc.L(v - d)) / (2 * d) == doctest::Approx(tc.L_prime(v)).epsilon(1e-6));
    CHECK((tc.L_prime(v + d) - tc.L_prime(v - d)) / (2 * d) ==
          doctest::Approx(tc.L_second(v)).epsilon(1e-5));
  }
}

TEST_CASE("monotone on sampled grids") {
  double prev_h = tc.h(-1e3);
  double prev_f = tc.f(-1e3);
  for (int i = 1; i <= 4000; ++i) {
    const double x = -1e3 + 2e3 * i / 4000.0;
    const double hx = tc.h(x);
    const double fx = tc.f(x);
    CHECK(hx > prev_h);
    CHECK(fx > prev_f);
    prev_h = hx;
    prev_f = fx;
  }
}

TEST_CASE("asymptotics at |u| = 1e3") {
  for (double u : {1e3, -1e3}) {
    CHECK(std::fabs(tc.h(u) / (0.5 * u * std::fabs(u)) - 1.0) <= 1e-3);
    const double v = tc.h(u);
    CHECK(std::fabs(tc.f(v) / (std::sqrt(2.0 / std::fabs(v)) * v) - 1.0) <= 1e-3);
  }
  // small |v|: f(v) ~ v
  CHECK(tc.f(1e-6) == doctest::Approx(1e-6).epsilon(1e-10));
}

TEST_CASE("L is midpoint convex") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = U(rng);
    const double y = U(rng);
    CHECK(tc.L(0.5 * (x + y)) <= 0.5 * (tc.L(x) + tc.L(y)) + 1e-12);
  }
}

TEST_CASE("non-finite input is a domain error") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(tc.h(nan), DomainError);
  CHECK_THROWS_AS(tc.f(inf), DomainError);
  CHECK_THROWS_AS(tc.f_prime(nan), DomainError);
  CHECK_THROWS_AS(tc.L(-inf), DomainError);
}
