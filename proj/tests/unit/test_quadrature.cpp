#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include <mopkit/quadrature.hpp>

using namespace mopkit;

TEST_CASE("gauss_legendre integrates polynomials of degree 2m-1 exactly") {
  for (int m : {1, 2, 5, 12, 40}) {
    const QuadratureRule r = gauss_legendre(m);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = 2 * m - 2;
    const double got = r.integrate([&](double x) { return std::pow(x, deg); });
    CHECK(got == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
  }
}

TEST_CASE("composite rule with square-root substitution handles edge singularities") {
  const Interval iv(-1.0, 1.0);
  const QuadratureRule r = composite_rule(iv, 4, 30, {true, true});
  const double got = r.integrate([](double x) { return 1.0 / std::sqrt((1.0 - x) * (1.0 + x)); });
  CHECK(got == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("adaptive integration converges on smooth and singular integrands") {
  const double a = integrate([](double x) { return std::exp(x); }, {0.0, 1.0});
  CHECK(a == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  const double b = integrate([](double x) { return std::pow(x, -0.5); }, {0.0, 1.0}, {true, false});
  CHECK(b == doctest::Approx(2.0).epsilon(1e-11));
  const auto c = integrate_adaptive(
      [](const Abscissa& p, std::span<double> out) { out[0] = std::pow(p.to_right, -0.7); }, 1, {0.0, 1.0},
      {false, true, -0.5, -0.7}, {});
  CHECK(c.converged);
  CHECK(c.values[0] == doctest::Approx(1.0 / 0.3).epsilon(1e-9));
}

TEST_CASE("adaptive integration reports non-convergence") {
  AdaptiveOptions opt;
  opt.max_segments = 3;
  opt.abs_tol = 1e-15;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(200.0 * x); }, {0.0, 10.0}, {}, opt), NumericError);
}

TEST_CASE("vector integrand integrates every component") {
  auto r = integrate_adaptive(
      [](double x, std::span<double> out) {
        out[0] = 1.0;
        out[1] = x * x;
      },
      2, {-1.0, 1.0}, {}, {});
  CHECK(r.converged);
  CHECK(r.values[0] == doctest::Approx(2.0));
  CHECK(r.values[1] == doctest::Approx(2.0 / 3.0));
}
