#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "systems.hpp"

using namespace mopkit;

namespace {

MomentTable monomial_identity(const WeightSystem& ws, int k_max) {
  MomentOptions opt;
  opt.frame = AffineFrame{};
  return moment_table(ws, k_max, opt);
}

double max_abs(const std::vector<std::vector<double>>& r) {
  double m = 0.0;
  for (const auto& row : r)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("multi-index bookkeeping") {
  const MultiIndex n{2, 0, 3};
  CHECK(n.total() == 5);
  CHECK(n.prefix(0) == 0);
  CHECK(n.prefix(2) == 2);
  CHECK(n.prefix(3) == 5);
  CHECK(n.locate(2) == std::pair<std::size_t, int>{2, 0});
  CHECK_THROWS_AS(MultiIndex({-1}), ArgumentError);

  const std::vector<double> r{0.5, 0.5};
  CHECK(MultiIndex::along_ray(r, 5) == MultiIndex{3, 2});
  CHECK(MultiIndex::along_ray(r, 30) == MultiIndex{15, 15});
  const std::vector<double> third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(MultiIndex::along_ray(third, 7).total() == 7);
}

TEST_CASE("block_hankel examples") {
  const auto leg = systems::legendre();
  const auto h = block_hankel(monomial_identity(leg, 4), MultiIndex{2});
  CHECK(h.matrix(0, 0) == doctest::Approx(2.0));
  CHECK(std::abs(h.matrix(0, 1)) < 1e-15);
  CHECK(std::abs(h.matrix(1, 0)) < 1e-15);
  CHECK(h.matrix(1, 1) == doctest::Approx(2.0 / 3.0));

  const auto ang = systems::angelesco_symmetric();
  const auto ha = block_hankel(monomial_identity(ang, 4), MultiIndex{1, 1});
  CHECK(ha.matrix(0, 0) == doctest::Approx(1.0));
  CHECK(ha.matrix(0, 1) == doctest::Approx(1.0));
  CHECK(ha.matrix(1, 0) == doctest::Approx(-0.5));
  CHECK(ha.matrix(1, 1) == doctest::Approx(0.5));

  const auto hz = block_hankel(monomial_identity(ang, 6), MultiIndex{3, 0});
  CHECK(hz.matrix.rows() == 3);
  CHECK(hz.matrix.cols() == 3);

  CHECK_THROWS_AS(block_hankel(monomial_identity(ang, 2), MultiIndex{2, 2}), ArgumentError);
}

TEST_CASE("normality_determinant examples") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 0, 0, 2.0 / 3;
  CHECK(analyze_square(a).determinant == doctest::Approx(4.0 / 3));
  Eigen::MatrixXd b(2, 2);
  b << 1, 1, -0.5, 0.5;
  CHECK(analyze_square(b).determinant == doctest::Approx(1.0));
  Eigen::MatrixXd c(3, 3);
  c << 1, 2, 1, 3, 4, 3, 5, 6, 5;
  const auto rep = analyze_square(c);
  CHECK(rep.singular);
  CHECK(std::abs(rep.determinant) < 1e-12);
}

TEST_CASE("type2_mop examples") {
  const auto leg = systems::legendre();
  for (auto basis : {MomentBasis::monomial, MomentBasis::legendre}) {
    const auto p = type2_mop(systems::table(leg, MultiIndex{2}, basis), MultiIndex{2}).polynomial;
    const auto c = p.coefficients();
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(-1.0 / 3).epsilon(1e-13));
    CHECK(std::abs(c[1]) < 1e-14);
    CHECK(p.leading_coefficient() == 1.0);
  }

  const auto ang = systems::angelesco_symmetric();
  const auto pa = type2_mop(systems::table(ang, MultiIndex{1, 1}), MultiIndex{1, 1}).polynomial.coefficients();
  CHECK(pa[0] == doctest::Approx(-1.0 / 3).epsilon(1e-13));
  CHECK(std::abs(pa[1]) < 1e-14);

  const auto even = build_general({WeightSpec::jacobi({-2.0, 2.0}, 0.7, 0.7)});
  const auto p1 = type2_mop(systems::table(even, MultiIndex{1}), MultiIndex{1}).polynomial.coefficients();
  CHECK(std::abs(p1[0]) < 1e-13);
}

TEST_CASE("type2_mop matches the monic Legendre oracle") {
  const auto leg = systems::legendre();
  for (int n = 1; n <= 12; ++n) {
    const MultiIndex nv{n};
    const auto p = type2_mop(systems::table(leg, nv), nv).polynomial;
    const auto ref = oracle::monic_legendre(n);
    const auto c = p.coefficients();
    REQUIRE(c.size() == ref.size());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - ref[i]) < 1e-11);
  }
}

TEST_CASE("non-normal index is reported") {
  // Two identical weights: the (1,1) conditions coincide.
  const auto ws = build_general({WeightSpec::constant({0.0, 1.0}), WeightSpec::constant({0.0, 1.0})});
  CHECK_THROWS_AS(type2_mop(systems::table(ws, MultiIndex{1, 1}), MultiIndex{1, 1}), NonNormalIndexError);
  CHECK_THROWS_AS(type1_mop(systems::table(ws, MultiIndex{1, 1}), MultiIndex{1, 1}), NonNormalIndexError);
}

TEST_CASE("degree cap") {
  const auto leg = systems::legendre();
  CHECK_THROWS_AS(type2_mop(systems::table(leg, MultiIndex{1}), MultiIndex{31}), ArgumentError);
}

TEST_CASE("type1_mop examples") {
  const auto leg = systems::legendre();
  const auto s1 = type1_mop(systems::table(leg, MultiIndex{1}), MultiIndex{1});
  CHECK(s1.A[0].coefficients()[0] == doctest::Approx(0.5));

  const auto s2 = type1_mop(systems::table(leg, MultiIndex{2}), MultiIndex{2});
  const auto a = s2.A[0].coefficients();
  CHECK(std::abs(a[0]) < 1e-14);
  CHECK(a[1] == doctest::Approx(1.5));

  const auto ang = systems::angelesco_symmetric();
  const auto s3 = type1_mop(systems::table(ang, MultiIndex{1, 1}), MultiIndex{1, 1});
  CHECK(s3.A[0].coefficients()[0] == doctest::Approx(-1.0));
  CHECK(s3.A[1].coefficients()[0] == doctest::Approx(1.0));

  const auto sz = type1_mop(systems::table(ang, MultiIndex{2, 0}), MultiIndex{2, 0});
  CHECK(sz.A[1].is_zero());
}

TEST_CASE("poly_roots examples") {
  auto r = poly_roots(Polynomial::from_coefficients({-1.0 / 3, 0.0, 1.0}));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-1.0 / std::sqrt(3.0)));
  CHECK(r[1] == doctest::Approx(1.0 / std::sqrt(3.0)));
  auto z = poly_roots(Polynomial::from_coefficients({0.0, 1.0}));
  REQUIRE(z.size() == 1);
  CHECK(z[0] == 0.0);
  auto l3 = poly_roots(Polynomial::from_coefficients({0.0, -0.6, 0.0, 1.0}));
  REQUIRE(l3.size() == 3);
  CHECK(l3[0] == doctest::Approx(-std::sqrt(0.6)));
  CHECK(std::abs(l3[1]) < 1e-15);
  CHECK(l3[2] == doctest::Approx(std::sqrt(0.6)));
  CHECK_THROWS_AS(poly_roots(Polynomial::from_coefficients({1.0})), ArgumentError);
}

TEST_CASE("poly_roots dedupes close roots") {
  auto r = poly_roots(Polynomial::from_coefficients({1.0, -2.0, 1.0}), 1e-6);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("orthogonality_residuals examples") {
  const auto leg = systems::legendre();
  const auto p = type2_mop(systems::table(leg, MultiIndex{2}), MultiIndex{2}).polynomial;
  CHECK(max_abs(orthogonality_residuals(p, leg, MultiIndex{2})) <= 1e-10);

  const auto ang = systems::angelesco_symmetric();
  const auto pa = type2_mop(systems::table(ang, MultiIndex{1, 1}), MultiIndex{1, 1}).polynomial;
  CHECK(max_abs(orthogonality_residuals(pa, ang, MultiIndex{1, 1})) <= 1e-10);

  const auto one = Polynomial::from_coefficients({1.0});
  CHECK(orthogonality_residuals(one, leg, MultiIndex{1})[0][0] == doctest::Approx(2.0));
}

// int x^k Q(x) dx - delta_{k,n-1} from closed-form weights, in quadruple precision.
std::vector<double> oracle_type1_residuals(const QuadTypeI& sys, const systems::ExactWeights& ex) {
  const int n = sys.nvec().total();
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    oracle::quad s = 0;
    for (std::size_t j = 0; j < ex.w.size(); ++j) {
      if (sys.nvec()[j] == 0) continue;
      s += oracle::integrate_quad(
          [&](oracle::quad x) { return pow(x, k) * sys.polynomial(j, x) * ex.w[j](x); }, ex.supports[j].a(),
          ex.supports[j].b());
    }
    r[static_cast<std::size_t>(k)] = static_cast<double>(k == n - 1 ? s - 1 : s);
  }
  return r;
}

TEST_CASE("type II orthogonality and type I conditions for the test systems") {
  struct Case {
    WeightSystem ws;
    systems::ExactWeights exact;
    std::vector<MultiIndex> indices;
  };
  const std::vector<Case> cases = {
      {systems::legendre(), systems::legendre_exact(), {{1}, {4}, {9}, {10}}},
      {systems::angelesco_symmetric(), systems::angelesco_symmetric_exact(), {{1, 1}, {2, 1}, {3, 3}, {6, 6}, {4, 0}}},
      {systems::nikishin2(), systems::nikishin2_exact(), {{1, 1}, {2, 1}, {3, 3}, {5, 4}}},
  };
  for (const auto& cs : cases) {
    for (const auto& nv : cs.indices) {
      CAPTURE(nv.total());
      const auto mt = systems::table(cs.ws, nv);
      const auto p = type2_mop(mt, nv).polynomial;
      CHECK(p.leading_coefficient() == 1.0);
      CHECK(max_abs(orthogonality_residuals(p, cs.ws, nv)) <= 1e-9);
      const auto sys = QuadTypeI::solve(cs.ws, nv);
      for (double r : oracle_type1_residuals(sys, cs.exact)) CHECK(std::abs(r) <= 1e-9);
      for (double r : type1_residuals(sys, cs.ws)) CHECK(std::abs(r) <= 1e-9);
    }
  }
}

TEST_CASE("double precision type I is accurate when the system is well conditioned") {
  const std::vector<std::pair<WeightSystem, MultiIndex>> cases = {
      {systems::legendre(), {10}}, {systems::angelesco_symmetric(), {6, 6}}, {systems::nikishin2(), {2, 1}}};
  for (const auto& [ws, nv] : cases) {
    const auto sys = type1_mop(systems::table(ws, nv), nv);
    for (double r : type1_residuals(sys, ws)) CHECK(std::abs(r) <= 1e-9);
  }
}

TEST_CASE("double and quadruple precision type I agree where both are accurate") {
  const auto ang = systems::angelesco_symmetric();
  const MultiIndex nv{3, 2};
  const auto d = type1_mop(systems::table(ang, nv), nv);
  const auto q = QuadTypeI::solve(ang, nv).rounded();
  for (std::size_t j = 0; j < 2; ++j) {
    const auto a = d.A[j].coefficients(), b = q.A[j].coefficients();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
  }
  for (double x : {-0.7, -0.2, 0.4, 0.9}) CHECK(d.linear_form(ang, x) == doctest::Approx(static_cast<double>(QuadTypeI::solve(ang, nv).linear_form(ang, x))).epsilon(1e-9));
}

TEST_CASE("quadruple precision weights match closed forms") {
  const auto nik = systems::nikishin2();
  for (double x : {1.0, 1.25, 1.5, 2.0})
    CHECK(static_cast<double>(weight_value_quad(nik.weight(1), x)) == doctest::Approx(std::log((x + 1) / x)).epsilon(1e-15));
  const auto jac = Weight(WeightSpec::jacobi({0.0, 1.0}, 0.5, -0.5));
  CHECK(static_cast<double>(weight_value_quad(jac, 0.25)) == doctest::Approx(std::sqrt(0.75) / std::sqrt(0.25)));
}

TEST_CASE("type1 residual in x-powers agrees for an untransformed system") {
  const auto leg = systems::legendre();
  const auto sys = type1_mop(systems::table(leg, MultiIndex{3}), MultiIndex{3});
  for (int k = 0; k < 3; ++k) {
    const double v =
        oracle::integrate([&](double x) { return std::pow(x, k) * sys.linear_form(leg, x); }, -1.0, 1.0);
    CHECK(std::abs(v - (k == 2 ? 1.0 : 0.0)) < 1e-12);
  }
}

TEST_CASE("linear solve and bordered determinant agree for n <= 4") {
  const std::vector<std::pair<WeightSystem, std::vector<MultiIndex>>> cases = {
      {systems::legendre(), {{1}, {2}, {3}, {4}}},
      {systems::angelesco_symmetric(), {{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 1}}},
      {systems::nikishin2(), {{1, 1}, {2, 1}, {2, 2}, {3, 1}}},
  };
  for (const auto& [ws, idx] : cases)
    for (const auto& nv : idx) {
      const auto a = type2_mop(systems::table(ws, nv), nv).polynomial.coefficients();
      const auto b = type2_mop_determinantal(systems::table(ws, nv, MomentBasis::monomial), nv).coefficients();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-8);
    }
}

TEST_CASE("Angelesco zeros: n_j simple zeros in each interval") {
  const auto ang = systems::angelesco_symmetric();
  const auto asym = build_angelesco({WeightSpec::constant({-1.0, -0.2}), WeightSpec::jacobi({0.1, 1.5}, 0.5, -0.3)});
  for (const auto& ws : {ang, asym})
    for (const MultiIndex nv : {MultiIndex{2, 1}, MultiIndex{3, 3}, MultiIndex{5, 4}, MultiIndex{6, 6}}) {
      const auto p = type2_mop(systems::table(ws, nv), nv).polynomial;
      const auto roots = poly_roots(p);
      REQUIRE(static_cast<int>(roots.size()) == nv.total());
      for (std::size_t j = 0; j < 2; ++j) {
        const auto& iv = ws.intervals()[j];
        const auto cnt = std::count_if(roots.begin(), roots.end(), [&](double r) { return iv.contains(r); });
        CHECK(cnt == nv[j]);
      }
    }
}

TEST_CASE("permuting weights together with the multi-index leaves P unchanged") {
  const auto ws = systems::nikishin2();
  const MultiIndex nv{3, 2};
  const auto a = type2_mop(systems::table(ws, nv), nv).polynomial.coefficients();
  const auto perm = ws.permuted({1, 0});
  const MultiIndex pv{2, 3};
  const auto b = type2_mop(systems::table(perm, pv), pv).polynomial.coefficients();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
}

TEST_CASE("high degree Angelesco polynomial keeps its roots in the intervals") {
  const auto ang = systems::angelesco_symmetric();
  const MultiIndex nv{15, 15};
  const auto res = type2_mop(systems::table(ang, nv), nv);
  const auto roots = poly_roots(res.polynomial);
  REQUIRE(roots.size() == 30);
  CHECK(std::count_if(roots.begin(), roots.end(), [](double r) { return r < 0; }) == 15);
  // Symmetric system: roots come in +/- pairs.
  for (std::size_t i = 0; i < 15; ++i) CHECK(std::abs(roots[i] + roots[29 - i]) < 1e-5);
}

TEST_CASE("frames and polynomial conversion") {
  const AffineFrame f = AffineFrame::for_hull({1.0, 4.0});
  CHECK(f.center == 2.5);
  CHECK(f.scale == 2.0);
  const Polynomial p({1.0, 2.0, 3.0}, f);
  const Polynomial q = p.in_frame(AffineFrame{});
  for (double x : {-1.0, 0.3, 2.0, 5.0}) CHECK(q(x) == doctest::Approx(p(x)).epsilon(1e-13));
  const auto c = p.coefficients();
  for (double x : {-1.0, 0.3, 2.0}) CHECK(oracle::horner(c, x) == doctest::Approx(p(x)).epsilon(1e-13));
}

TEST_CASE("legendre helpers") {
  const std::vector<double> c{0.0, 0.0, 1.0};
  const auto m = legendre_to_monomial(c);
  CHECK(m[0] == doctest::Approx(-0.5));
  CHECK(m[2] == doctest::Approx(1.5));
  CHECK(legendre_leading_coefficient(2) == doctest::Approx(1.5));
  // P1 P1 = (2/3) P2 + (1/3) P0
  const auto g = legendre_product(1, 1);
  CHECK(g[0] == doctest::Approx(2.0 / 3));
  CHECK(g[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("quadruple precision type II agrees with the double solve") {
  const std::vector<std::pair<WeightSystem, MultiIndex>> cases = {
      {systems::legendre(), {6}}, {systems::angelesco_symmetric(), {3, 3}}, {systems::nikishin2(), {3, 2}}};
  for (const auto& [ws, nv] : cases) {
    const auto q = QuadTypeII::solve(ws, nv);
    const auto d = type2_mop(systems::table(ws, nv), nv).polynomial.coefficients();
    const auto c = q.rounded().coefficients();
    REQUIRE(c.size() == d.size());
    CHECK(c.back() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - d[i]) <= 1e-9 * std::max(1.0, std::abs(d[i])));
    const auto r = q.real_roots();
    const auto rd = poly_roots(type2_mop(systems::table(ws, nv), nv).polynomial);
    REQUIRE(r.size() == rd.size());
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(rd[i]).epsilon(1e-9));
  }
  CHECK_THROWS_AS(QuadTypeII::solve(systems::legendre(), MultiIndex{kMaxQuadDegree + 1}), ArgumentError);
}

TEST_CASE("quadruple precision type II zeros for p = 1 are Gauss-Legendre nodes") {
  const int n = 40;
  const auto roots = QuadTypeII::solve(systems::legendre(), MultiIndex{n}).real_roots();
  REQUIRE(roots.size() == static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton on the three-term recurrence from the Tricomi guess.
    long double x = -std::cos(M_PI * (i + 0.75L) / (n + 0.5L));
    for (int it = 0; it < 50; ++it) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      x -= p1 / (n * (x * p1 - p0) / (x * x - 1));
    }
    CHECK(roots[static_cast<std::size_t>(i)] == doctest::Approx(static_cast<double>(x)).epsilon(1e-14));
  }
}

TEST_CASE("quadruple precision type II beyond the double precision cap") {
  const auto ang = systems::angelesco_symmetric();
  const auto q = QuadTypeII::solve(ang, MultiIndex{30, 30});
  const auto r = q.real_roots();
  REQUIRE(r.size() == 60);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(r[i] > -1.0);
    CHECK(r[i] < 0.0);
    CHECK(std::abs(r[i] + r[59 - i]) <= 1e-12);
  }
  // Orthogonality by independent quadrature, relative to int |P| |x|^k.
  for (const auto& [a, b] : {std::pair{-1.0, 0.0}, std::pair{0.0, 1.0}}) {
    const auto s = oracle::moments_quad([&](oracle::quad x) { return q(x); }, a, b, 30, 4096);
    const auto m = oracle::moments_quad([&](oracle::quad x) { return abs(q(x)); }, a, b, 30, 256);
    for (int k = 0; k < 30; ++k)
      CHECK(static_cast<double>(abs(s[static_cast<std::size_t>(k)]) / abs(m[static_cast<std::size_t>(k)])) <= 1e-20);
  }
}
