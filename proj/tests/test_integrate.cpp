#include <doctest.h>

#include <cmath>

#include "hjk/error.hpp"
#include "hjk/integrate.hpp"
#include "oracle.hpp"

using namespace hjk;

TEST_CASE("one step reproduces the Taylor polynomial on linear problems") {
  const double lambda = -0.8, dt = 0.3, z = lambda * dt;
  RhsFn rhs = [&](const std::vector<double>& y, const StageTime&, std::vector<double>& out) {
    out.assign(1, lambda * y[0]);
  };
  double taylor = 1.0, term = 1.0;
  for (int order = 1; order <= 3; ++order) {
    term *= z / order;
    taylor += term;
    std::vector<double> y = {1.0};
    ssp_rk_step(y, 0.0, dt, order, rhs);
    CHECK(y[0] == doctest::Approx(taylor).epsilon(1e-14));
  }
}

TEST_CASE("SSP Runge-Kutta converges at its order on a forced problem") {
  // y' = -y + cos t, y(0) = 0: y = (sin t + cos t - e^{-t}) / 2
  RhsFn rhs = [](const std::vector<double>& y, const StageTime& t, std::vector<double>& out) {
    out.assign(1, -y[0] + std::cos(t));
  };
  const double T = 2.0, exact = 0.5 * (std::sin(T) + std::cos(T) - std::exp(-T));
  for (int order = 1; order <= 3; ++order) {
    std::vector<double> err;
    for (int steps : {20, 40, 80, 160}) {
      std::vector<double> y = {0.0};
      double dt = T / steps;
      for (int s = 0; s < steps; ++s) ssp_rk_step(y, s * dt, dt, order, rhs);
      err.push_back(std::abs(y[0] - exact));
    }
    auto o = oracle::orders(err);
    CAPTURE(order);
    CHECK(o.back() == doctest::Approx(order).epsilon(0.05));
  }
}

TEST_CASE("stage callback sees every stage time") {
  std::vector<double> times;
  RhsFn rhs = [](const std::vector<double>& y, const StageTime&, std::vector<double>& out) { out = y; };
  StageFn stage = [&](std::vector<double>&, const StageTime& t) { times.push_back(t.time()); };
  std::vector<double> y = {1.0};
  ssp_rk_step(y, 1.0, 0.5, 3, rhs, stage);
  REQUIRE(times.size() == 3);
  CHECK(times[0] == doctest::Approx(1.5));
  CHECK(times[1] == doctest::Approx(1.25));
  CHECK(times[2] == doctest::Approx(1.5));
  CHECK_THROWS_AS(ssp_rk_step(y, 0.0, 0.1, 4, rhs), Error);
}

TEST_CASE("CFL rules") {
  std::vector<double> h = {0.1, 0.05}, c = {2.0, 1.0};
  CHECK(cfl_dt(0.5, h, c, CflRule::Max) == doctest::Approx(0.5 / 20.0));
  CHECK(cfl_dt(0.5, h, c, CflRule::Sum) == doctest::Approx(0.5 / 40.0));
  std::vector<double> bad = {0.0, 1.0};
  CHECK_THROWS_AS(cfl_dt(0.5, h, bad), Error);
  CHECK_THROWS_AS(cfl_dt(-1.0, h, c), Error);
  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(cfl_dt(0.5, h, one), Error);
}

TEST_CASE("time controller lands exactly on the final time") {
  TimeController tc(0.7, 1.0);
  std::vector<double> h = {0.1}, c = {1.0};
  int steps = 0;
  double prev = 0.0;
  while (!tc.done()) {
    double dt = tc.next_dt(h, c);
    CHECK(dt > 0.0);
    CHECK(dt <= 0.07 + 1e-15);
    tc.advance();
    CHECK(tc.t() > prev);
    prev = tc.t();
    ++steps;
  }
  CHECK(tc.t() == 1.0);
  CHECK(steps == 15);
}

TEST_CASE("no sliver step from round-off") {
  TimeController tc(0.5, 1.0);
  std::vector<double> h = {1.0 / 40}, c = {1.0};
  int steps = 0;
  while (!tc.done()) {
    tc.next_dt(h, c);
    tc.advance();
    ++steps;
  }
  CHECK(steps == 80);
}

TEST_CASE("stable beta table") {
  CHECK(select_beta(1, 1) == 2.0);
  CHECK(select_beta(2, 1) == 1.0);
  CHECK(select_beta(3, 1) == doctest::Approx(1.243));
  CHECK(select_beta(3, 2) == doctest::Approx(0.6));
  CHECK_THROWS_AS(select_beta(0, 1), Error);
  CHECK_THROWS_AS(select_beta(1, 3), Error);
}

TEST_CASE("inner stages see data consistent with their expansion") {
  auto g = [](double t) { return std::sin(3.0 * t); };
  StageTime plain(0.4);
  CHECK(plain.sample(g) == doctest::Approx(g(0.4)));
  StageTime s2(0.4, 0.2, 0.5, 0.25);
  double expect = g(0.4) + 0.1 * 3.0 * std::cos(1.2) - 0.25 * 0.04 * 9.0 * std::sin(1.2);
  CHECK(s2.sample(g) == doctest::Approx(expect).epsilon(1e-8));
  CHECK(static_cast<double>(s2) == doctest::Approx(0.5));
}

TEST_CASE("prescribed components keep the Runge-Kutta order") {
  // u0 is prescribed data g = sin t and u1' = -(u1 - u0).
  const double T = 2.0;
  const double exact = 0.5 * (std::sin(T) - std::cos(T) + std::exp(-T));
  RhsFn rhs = [](const std::vector<double>& u, const StageTime&, std::vector<double>& out) {
    out = {0.0, -(u[1] - u[0])};
  };
  StageFn bc = [](std::vector<double>& u, const StageTime& t) {
    u[0] = t.sample([](double s) { return std::sin(s); });
  };
  for (int order = 2; order <= 3; ++order) {
    std::vector<double> err;
    for (int steps : {20, 40, 80, 160}) {
      std::vector<double> u = {0.0, 0.0};
      double dt = T / steps;
      for (int s = 0; s < steps; ++s) ssp_rk_step(u, s * dt, dt, order, rhs, bc);
      err.push_back(std::abs(u[1] - exact));
    }
    CAPTURE(order);
    CHECK(oracle::orders(err).back() > order - 0.15);
  }
}
