#include <doctest.h>

#include <cmath>
#include <random>

#include "hjk/error.hpp"
#include "hjk/weno.hpp"
#include "oracle.hpp"

using namespace hjk;

namespace {

const std::vector<double> kOffsets = {-3, -2, -1, 0, 1, 2};

double kernel_moment(double a, double cell, const std::function<double(double)>& v) {
  return oracle::integrate([&](double t) { return a * std::exp(a * t) * v(t); }, -cell, 0.0, 400);
}

}  // namespace

TEST_CASE("exponential quadrature integrates its basis exactly") {
  const double b = 1.0;
  std::vector<std::function<double(double)>> basis = {
      [](double) { return 1.0; },          [](double t) { return t; },
      [](double t) { return t * t; },      [](double t) { return t * t * t; },
      [&](double t) { return std::exp(b * t); }, [&](double t) { return std::exp(-b * t); }};
  for (double a : {0.3, 1.0, 2.4, 8.0}) {
    auto c = exp_quadrature_coeffs(a, b, kOffsets, 1.0, Basis::Gamma6);
    REQUIRE(c.size() == 6);
    for (const auto& f : basis) {
      double q = 0.0;
      for (int j = 0; j < 6; ++j) q += c[j] * f(kOffsets[j]);
      CHECK(q == doctest::Approx(kernel_moment(a, 1.0, f)).epsilon(1e-10));
    }
  }
}

TEST_CASE("quadrature on an uneven stencil") {
  std::vector<double> off = {-2.7, -1.9, -1.1, 0.0, 0.8, 1.9};
  auto c = exp_quadrature_coeffs(1.7, 1.0, off, 1.1, Basis::Gamma6);
  auto f = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t * t; };
  double q = 0.0;
  for (int j = 0; j < 6; ++j) q += c[j] * f(off[j]);
  CHECK(q == doctest::Approx(kernel_moment(1.7, 1.1, f)).epsilon(1e-10));
}

TEST_CASE("basis moments agree with numerical integration") {
  double a = 1.3, b = 1.0, d = 1.0;
  auto m = basis_moments(a, b, d, Basis::Gamma6, 6);
  CHECK(m[0] == doctest::Approx(1.0 - std::exp(-a)));
  CHECK(m[4] == doctest::Approx(kernel_moment(a, d, [&](double t) { return std::exp(b * t); })));
}

TEST_CASE("undivided differences are exact on polynomials") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<double> off = {0.0, 1.0 + u(rng), 2.0 + u(rng), 3.0 + u(rng), 4.0 + u(rng)};
  // p(t) = 2 - t + 3 t^2 - 0.5 t^3 + 0.25 t^4
  auto p = [](double t) { return 2 - t + 3 * t * t - 0.5 * t * t * t + 0.25 * t * t * t * t; };
  double exact[4] = {2.0, -1.0, 6.0, -3.0};
  for (int m = 0; m <= 3; ++m) {
    auto c = undivided_diff_coeffs(m, off);
    double s = 0.0;
    for (size_t j = 0; j < off.size(); ++j) s += c[j] * p(off[j]);
    CHECK(s == doctest::Approx(exact[m]).epsilon(1e-9));
  }
}

TEST_CASE("undivided differences reject short stencils and duplicates") {
  std::vector<double> two = {0.0, 1.0};
  CHECK_THROWS_AS(undivided_diff_coeffs(2, two), Error);
  std::vector<double> dup = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(undivided_diff_coeffs(1, dup), Error);
}

TEST_CASE("linear weights recombine the substencil rules") {
  for (double a : {0.5, 1.0, 2.4}) {
    QuadratureTable t = build_quadrature_table(a, 1.0, kOffsets, 3, 1.0);
    CHECK(t.weno);
    CHECK(t.d[0] + t.d[1] + t.d[2] == doctest::Approx(1.0));
    for (double d : t.d) CHECK(d > 0.0);
    CHECK(t.residual < 1e-10);
  }
}

TEST_CASE("nonlinear weights form a partition of unity") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, 3> d = {0.3, 0.5, 0.2};
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 3> beta = {std::pow(u(rng), 4), std::pow(u(rng), 4), std::pow(u(rng), 4)};
    double tau = std::abs(beta[0] - beta[2]);
    auto w = nonlinear_weights(beta, tau, d, 1e-6);
    CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : w) CHECK(x >= 0.0);
  }
}

TEST_CASE("equal indicators recover the linear weights") {
  std::array<double, 3> d = {0.3, 0.5, 0.2};
  auto w = nonlinear_weights({0.7, 0.7, 0.7}, 0.0, d, 1e-6);
  for (int r = 0; r < 3; ++r) CHECK(w[r] == doctest::Approx(d[r]).epsilon(1e-12));
}

TEST_CASE("a rough substencil loses its weight") {
  std::array<double, 3> d = {0.3, 0.5, 0.2};
  auto w = nonlinear_weights({1.0, 1e-12, 1e-12}, 1.0, d, 1e-6);
  CHECK(w[0] < 1e-5);
}

TEST_CASE("WENO integral matches the linear rule on smooth data") {
  const double h = 1.0 / 200;
  QuadratureTable t = build_quadrature_table(1.0, 1.0, kOffsets, 3, 1.0);
  double win[6];
  for (int j = 0; j < 6; ++j) win[j] = std::sin(2 * oracle::kPi * (0.3 + h * kOffsets[j]));
  double lin = linear_integral(win, t);
  double nl = weno_integral(win, t, 1e-6);
  CHECK(std::abs(nl - lin) < 1e-8 * std::abs(lin) + 1e-8);
}

TEST_CASE("WENO integral stays bounded across a jump") {
  QuadratureTable t = build_quadrature_table(1.0, 1.0, kOffsets, 3, 1.0);
  double win[6] = {0, 0, 0, 0, 1, 1};
  auto c = reconstruct_cell_integral(win, t, {});
  CHECK(c.omega[2] < 1e-3);
  // Stencils 0 and 1 see zero data on the cell [-1, 0].
  CHECK(std::abs(c.value) < 1e-3);
}

TEST_CASE("smoothstep is monotone and clamped") {
  CHECK(smoothstep(-1.0) == 0.0);
  CHECK(smoothstep(2.0) == 1.0);
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    double s = smoothstep(i / 1000.0);
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
}

TEST_CASE("filter sigma lies in [0, 1]") {
  QuadratureTable t = build_quadrature_table(1.0, 1.0, kOffsets, 3, 1.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    double win[6];
    for (double& w : win) w = u(rng);
    double s = filter_sigma(win, t, 1e-6);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("invalid quadrature parameters") {
  CHECK_THROWS_AS(exp_quadrature_coeffs(-1.0, 1.0, kOffsets, 1.0, Basis::Gamma6), Error);
  CHECK_THROWS_AS(exp_quadrature_coeffs(1.0, 1.0, std::vector<double>{0.0, 1.0}, 1.0,
                                        Basis::Gamma6),
                  Error);
}
