#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "systems.hpp"

using namespace mopkit;

TEST_CASE("interval invariants") {
  CHECK_THROWS_AS(Interval(1.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(Interval(0.0, INFINITY), ArgumentError);
  const Interval iv(-1.0, 2.0);
  CHECK(iv.length() == 3.0);
  CHECK(iv.contains(2.0));
  CHECK_FALSE(iv.interior_contains(2.0));
}

TEST_CASE("stieltjes_transform examples") {
  const Weight left(WeightSpec::constant({-2.0, -1.0}));
  CHECK(stieltjes_transform(left, 0.0, MarkovSign::plus) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  const Weight right(WeightSpec::constant({1.0, 2.0}));
  CHECK(stieltjes_transform(right, 0.0, MarkovSign::minus) == doctest::Approx(std::log(2.0)).epsilon(1e-13));

  // Markov-function decay: x * value -> int v = 1.
  const double x = 1e6;
  CHECK(x * stieltjes_transform(left, x, MarkovSign::plus) == doctest::Approx(1.0).epsilon(1e-5));

  CHECK_THROWS_AS(stieltjes_transform(left, -1.5, MarkovSign::plus), DomainError);
  CHECK_THROWS_AS(stieltjes_transform(left, -1.0, MarkovSign::plus), DomainError);
}

TEST_CASE("stieltjes_transform is monotone off the support") {
  const Weight v(WeightSpec::jacobi({-1.0, 0.0}, 0.5, -0.5));
  double prev = stieltjes_transform(v, 0.05, MarkovSign::plus);
  for (double x = 0.1; x < 3.0; x += 0.05) {
    const double cur = stieltjes_transform(v, x, MarkovSign::plus);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("build_angelesco orders intervals and rejects overlaps") {
  auto ws = build_angelesco({WeightSpec::constant({-1.0, 0.0}), WeightSpec::constant({0.01, 1.0})});
  CHECK(ws.p() == 2);
  CHECK(ws.kind() == SystemKind::angelesco);
  CHECK_THROWS_AS(build_angelesco({WeightSpec::constant({-1.0, 0.5}), WeightSpec::constant({0.0, 1.0})}),
                  ConstructionError);
  auto ordered = build_angelesco({WeightSpec::jacobi({1.0, 2.0}, 0.5, 0.5), WeightSpec::jacobi({-2.0, -1.0}, 0, 0)});
  CHECK(ordered.intervals()[0] == Interval(-2.0, -1.0));
  CHECK(ordered.intervals()[1] == Interval(1.0, 2.0));
}

TEST_CASE("build_nikishin examples") {
  const auto ws = systems::nikishin2();
  CHECK(ws.weight(1)(1.5) == doctest::Approx(std::log(2.5 / 1.5)).epsilon(1e-12));
  CHECK_THROWS_AS(build_nikishin(WeightSpec::constant({1.0, 2.0}), {WeightSpec::constant({1.0, 2.0})}),
                  ConstructionError);

  const auto ws3 = build_nikishin(WeightSpec::constant({3.0, 4.0}),
                                  {WeightSpec::constant({1.0, 2.0}), WeightSpec::constant({-1.0, 0.0})});
  CHECK(ws3.p() == 3);
  for (double x = 3.01; x < 4.0; x += 0.07)
    for (std::size_t j = 1; j < 3; ++j) CHECK(ws3.weight(j)(x) / ws3.weight(0)(x) > 0.0);
}

TEST_CASE("Nikishin ratios are positive for either interval order") {
  const auto mirrored = build_nikishin(WeightSpec::constant({-2.0, -1.0}), {WeightSpec::constant({0.0, 1.0})});
  for (double x = -1.99; x < -1.0; x += 0.05) CHECK(mirrored.weight(1)(x) > 0.0);
}

TEST_CASE("moments examples") {
  const auto leg = systems::legendre();
  const auto c = moments(leg, 0, 5);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(std::abs(c[1]) < 1e-14);
  CHECK(c[2] == doctest::Approx(2.0 / 3.0));
  for (int k = 1; k <= 5; k += 2) CHECK(std::abs(c[static_cast<std::size_t>(k)]) < 1e-13);

  const auto cheb = build_general({WeightSpec::jacobi({-1.0, 1.0}, -0.5, -0.5)});
  const double pi_oracle = oracle::integrate([](double) { return 1.0; }, 0.0, M_PI);  // x = cos(theta)
  CHECK(moments(cheb, 0, 0)[0] == doctest::Approx(pi_oracle).epsilon(1e-12));
}

TEST_CASE("moments: tolerance refinement and scaling") {
  const auto ws = build_general({WeightSpec::jacobi({0.0, 2.0}, 0.3, -0.4)});
  const auto a = moments(ws, 0, 8, 1e-10);
  const auto b = moments(ws, 0, 8, 1e-11);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-10);

  const auto scaled = ws.with_scaled_weight(0, 3.0);
  const auto s = moments(scaled, 0, 8, 1e-12);
  const auto base = moments(ws, 0, 8, 1e-12);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(s[k] - 3.0 * base[k]) <= 3e-12);
}

TEST_CASE("moments of an exp_poly weight match an independent quadrature") {
  const auto ws = build_general({WeightSpec::exp_poly({-1.0, 1.0}, {0.0, 0.5, 1.0})});
  const auto c = moments(ws, 0, 4);
  for (int k = 0; k <= 4; ++k) {
    const double ref =
        oracle::integrate([&](double x) { return std::pow(x, k) * std::exp(-(0.5 * x + x * x)); }, -1.0, 1.0);
    CHECK(c[static_cast<std::size_t>(k)] == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("legendre-basis moments agree with monomial moments") {
  const auto ws = systems::angelesco_symmetric();
  MomentOptions mono, leg;
  leg.basis = MomentBasis::legendre;
  const auto a = moment_table(ws, 6, mono);
  const auto b = moment_table(ws, 6, leg);
  // P_2 = (3t^2 - 1)/2
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(b.c[j][2] == doctest::Approx(1.5 * a.c[j][2] - 0.5 * a.c[j][0]).epsilon(1e-13));
}

TEST_CASE("weight validation") {
  CHECK_THROWS_AS(Weight(WeightSpec::jacobi({0.0, 1.0}, -1.0, 0.0)), ArgumentError);
  CHECK(Weight(WeightSpec::constant({0.0, 1.0}))(2.0) == 0.0);
}
