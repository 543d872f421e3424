#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "systems.hpp"

using namespace mopkit;

namespace {

double monomial_determinant(const WeightSystem& ws, const MultiIndex& nv) {
  MomentOptions opt;
  opt.frame = AffineFrame{};
  const auto mt = moment_table(ws, required_moment_order(nv), opt);
  return normality_determinant(block_hankel(mt, nv)).determinant;
}

std::vector<double> uniform_points(const Interval& iv, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(iv.a(), iv.b());
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_CASE("basis functions follow the block layout") {
  const auto ang = systems::angelesco_symmetric();
  const MultiIndex nv{2, 1};
  CHECK(basis_g(ang, nv, 2, 0.5) == ang.weight(1)(0.5));
  CHECK(basis_g(ang, nv, 1, -0.5) == doctest::Approx(-0.5 * ang.weight(0)(-0.5)));
  CHECK(basis_g(ang, nv, 1, 0.5) == 0.0);
  CHECK(basis_f(2, 2.0) == 4.0);
}

TEST_CASE("Vandermonde and cross products") {
  const std::vector<double> a{0, 1, 2}, b{1, 0, 2};
  CHECK(vandermonde(a) == 2.0);
  CHECK(vandermonde(b) == -2.0);
  const std::vector<double> x{2, 3}, y{1};
  CHECK(delta_cross(x, y) == 2.0);
  CHECK(vandermonde(std::vector<double>{}) == 1.0);
  CHECK(delta_cross(x, std::vector<double>{}) == 1.0);
}

TEST_CASE("g determinant examples") {
  const auto ang = systems::angelesco_symmetric();
  const MultiIndex nv{1, 1};
  CHECK(g_determinant(ang, nv, std::vector<double>{-0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(g_determinant(ang, nv, std::vector<double>{-0.5, -0.4}) == 0.0);
  CHECK(g_determinant(ang, MultiIndex{2, 1}, std::vector<double>{-0.5, -0.5, 0.5}) == 0.0);
  const auto lg = g_determinant_log(ang, nv, std::vector<double>{-0.5, 0.5});
  CHECK(lg.sign == 1);
  CHECK(lg.value() == doctest::Approx(1.0));
}

TEST_CASE("sign condition holds for Angelesco and Nikishin systems") {
  const auto ang = systems::angelesco_symmetric();
  for (const MultiIndex nv : {MultiIndex{1, 1}, MultiIndex{2, 1}, MultiIndex{3, 3}, MultiIndex{4, 2}}) {
    const auto rep = sign_constancy_check(ang, nv, 1000, 11);
    CHECK(rep.sign == 1);
    CHECK(rep.violations == 0);
    CHECK(rep.nonzero > 0);
  }
  const auto nik = systems::nikishin2();
  for (const MultiIndex nv : {MultiIndex{1, 1}, MultiIndex{2, 1}, MultiIndex{2, 2}, MultiIndex{2, 3}, MultiIndex{3, 2}, MultiIndex{4, 4}}) {
    const auto rep = sign_constancy_check(nik, nv, 1000, 12);
    CHECK(rep.sign != 0);
    CHECK(rep.violations == 0);
    CHECK(rep.nonzero == rep.trials);
  }
}

TEST_CASE("two identical weights give a vanishing determinant") {
  const auto ws =
      build_general({WeightSpec::constant({-1.0, 1.0}), WeightSpec::constant({-1.0, 1.0})});
  const auto rep = sign_constancy_check(ws, MultiIndex{1, 1}, 200, 3);
  CHECK(rep.all_zero());
  CHECK(rep.violations == 0);
}

TEST_CASE("joint density examples") {
  const auto leg = systems::legendre();
  const double d1 = monomial_determinant(leg, MultiIndex{1});
  CHECK(d1 == doctest::Approx(2.0));
  for (double x : {-0.9, 0.0, 0.7}) CHECK(joint_density(leg, MultiIndex{1}, std::vector<double>{x}, d1) == doctest::Approx(0.5));

  const auto ang = systems::angelesco_symmetric();
  const MultiIndex nv{1, 1};
  const double d = monomial_determinant(ang, nv);
  CHECK(d == doctest::Approx(1.0));
  CHECK(joint_density(ang, nv, std::vector<double>{-0.5, 0.5}, d) == doctest::Approx(0.5));
  CHECK(joint_density(ang, nv, std::vector<double>{0.5, 0.5}, d) == 0.0);
  CHECK_THROWS_AS(joint_density(ang, nv, std::vector<double>{-0.5, 0.5}, 0.0), NonNormalIndexError);
}

TEST_CASE("joint density is symmetric under permutations") {
  const auto nik = systems::nikishin2();
  const MultiIndex nv{2, 2};
  std::vector<double> x{1.1, 1.35, 1.6, 1.9};
  const double ref = joint_density_unnormalized(nik, nv, x);
  CHECK(ref > 0.0);
  std::sort(x.begin(), x.end());
  while (std::next_permutation(x.begin(), x.end()))
    CHECK(joint_density_unnormalized(nik, nv, x) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("Angelesco product form equals the determinant form") {
  const auto ang = systems::angelesco_symmetric();
  CHECK(angelesco_density(ang, MultiIndex{1, 1}, std::vector<double>{-0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(angelesco_density(ang, MultiIndex{1, 1}, std::vector<double>{-0.5, -0.3}) == 0.0);

  // n = (2, 0) is the squared Vandermonde times the weight.
  const std::vector<double> two{-0.7, -0.2};
  CHECK(angelesco_density(ang, MultiIndex{2, 0}, two) == doctest::Approx(0.25));

  const auto asym = build_angelesco({WeightSpec::jacobi({-2.0, -0.5}, 0.5, 1.0), WeightSpec::constant({0.0, 1.5})});
  std::mt19937_64 rng(5);
  for (const auto& ws : {ang, asym})
    for (const MultiIndex nv : {MultiIndex{2, 1}, MultiIndex{3, 2}}) {
      double worst = 0.0;
      for (int t = 0; t < 1000; ++t) {
        auto x = uniform_points(ws.intervals()[0], nv[0], rng);
        const auto x2 = uniform_points(ws.intervals()[1], nv[1], rng);
        x.insert(x.end(), x2.begin(), x2.end());
        const double a = angelesco_density(ws, nv, x);
        const double b = joint_density_unnormalized(ws, nv, x);
        worst = std::max(worst, std::abs(a - b) / std::max(b, 1e-300));
      }
      CHECK(worst <= 1e-10);
    }
}

TEST_CASE("Nikishin extended density") {
  const auto nik = systems::nikishin2();
  CHECK(nikishin_extended_density(nik, MultiIndex{0, 1}, std::vector<double>{1.5}, std::vector<double>{-0.5}) ==
        doctest::Approx(0.5));
  const std::vector<double> x{1.2, 1.7};
  CHECK(nikishin_extended_density(nik, MultiIndex{2, 0}, x, std::vector<double>{}) ==
        doctest::Approx(vandermonde(x) * vandermonde(x)));
  CHECK(nikishin_extended_density(nik, MultiIndex{1, 1}, std::vector<double>{1.2, 1.2}, std::vector<double>{-0.5}) ==
        0.0);
  CHECK_THROWS_AS(
      nikishin_extended_density(nik, MultiIndex{1, 1}, std::vector<double>{-0.5, 1.2}, std::vector<double>{-0.2}),
      DomainError);
}

TEST_CASE("Cauchy-Vandermonde determinant") {
  CHECK(cauchy_vandermonde_det(std::vector<double>{2, 3}, std::vector<double>{1}, 1) == doctest::Approx(-0.5));
  const std::vector<double> x3{2, 3, 4};
  CHECK(cauchy_vandermonde_det(x3, std::vector<double>{}, 3) == doctest::Approx(vandermonde(x3)));
  const std::vector<std::vector<double>> m{{1, 1, 1}, {2, 3, 4}, {1.0, 0.5, 1.0 / 3.0}};
  CHECK(cauchy_vandermonde_det(x3, std::vector<double>{1}, 2) == doctest::Approx(oracle::permutation_det(m)));
  CHECK(std::abs(oracle::permutation_det(m)) == doctest::Approx(vandermonde(x3) / delta_cross(x3, std::vector<double>{1})));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(1.0, 2.0), uy(-1.0, 0.0);
  for (int n = 1; n <= 5; ++n)
    for (int n2 = 0; n2 <= n; ++n2) {
      std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n2));
      for (auto& v : x) v = ux(rng);
      for (auto& v : y) v = uy(rng);
      const double lhs = std::abs(cauchy_vandermonde_det(x, y, n - n2));
      const double rhs = std::abs(vandermonde(x) * vandermonde(y) / delta_cross(x, y));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  CHECK_THROWS_AS(cauchy_vandermonde_det(std::vector<double>{1.0, 2.0}, std::vector<double>{2.0}, 1), DomainError);
}

TEST_CASE("integrating Y out of the extended density recovers the determinant density") {
  const auto nik = systems::nikishin2();
  CHECK(marginalization_check(nik, MultiIndex{1, 0}).max_relative_deviation <= 1e-14);
  CHECK(marginalization_check(nik, MultiIndex{1, 1}).max_relative_deviation <= 1e-8);
  CHECK(marginalization_check(nik, MultiIndex{2, 1}).max_relative_deviation <= 1e-7);
  CHECK(marginalization_check(nik, MultiIndex{2, 2}).max_relative_deviation <= 1e-7);
}

TEST_CASE("Cauchy-Binet integral reproduces D_n") {
  const std::vector<std::pair<WeightSystem, std::vector<MultiIndex>>> cases = {
      {systems::legendre(), {{1}, {2}, {3}}},
      {systems::angelesco_symmetric(), {{1, 1}, {2, 1}, {1, 2}}},
      {systems::nikishin2(), {{1, 1}, {2, 1}, {1, 2}}},
  };
  for (const auto& [ws, idx] : cases)
    for (const auto& nv : idx) {
      const double d = monomial_determinant(ws, nv);
      CHECK(cauchy_binet_integral(ws, nv) == doctest::Approx(d).epsilon(1e-7));
    }
}
