#pragma once

// Reference computations for tests. Nothing here calls into the library's
// quadrature or linear algebra, so agreement is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/multiprecision/float128.hpp>

namespace oracle {

using quad = boost::multiprecision::float128;

// Composite 5-point Gauss-Legendre in quadruple precision; nodes and weights
// from their closed forms.
inline quad integrate_quad(const std::function<quad(quad)>& f, quad a, quad b, int panels = 512) {
  const quad r = sqrt(quad(10) / 7);
  const quad x1 = sqrt(5 - 2 * r) / 3, x2 = sqrt(5 + 2 * r) / 3;
  const quad w0 = quad(128) / 225, w1 = (322 + 13 * sqrt(quad(70))) / 900, w2 = (322 - 13 * sqrt(quad(70))) / 900;
  const quad xs[5] = {-x2, -x1, 0, x1, x2};
  const quad ws[5] = {w2, w1, w0, w1, w2};
  const quad h = (b - a) / panels;
  quad s = 0;
  for (int p = 0; p < panels; ++p) {
    const quad c = a + (p + quad(0.5)) * h;
    for (int i = 0; i < 5; ++i) s += ws[i] * f(c + h / 2 * xs[i]);
  }
  return s * h / 2;
}

// int f(x) x^k dx for k = 0 .. k_max - 1 with one evaluation of f per node,
// same rule as integrate_quad.
inline std::vector<quad> moments_quad(const std::function<quad(quad)>& f, quad a, quad b, int k_max,
                                      int panels = 512) {
  const quad r = sqrt(quad(10) / 7);
  const quad x1 = sqrt(5 - 2 * r) / 3, x2 = sqrt(5 + 2 * r) / 3;
  const quad w0 = quad(128) / 225, w1 = (322 + 13 * sqrt(quad(70))) / 900, w2 = (322 - 13 * sqrt(quad(70))) / 900;
  const quad xs[5] = {-x2, -x1, 0, x1, x2};
  const quad ws[5] = {w2, w1, w0, w1, w2};
  const quad h = (b - a) / panels;
  std::vector<quad> s(static_cast<std::size_t>(k_max), 0);
  for (int p = 0; p < panels; ++p) {
    const quad c = a + (p + quad(0.5)) * h;
    for (int i = 0; i < 5; ++i) {
      const quad x = c + h / 2 * xs[i];
      quad v = ws[i] * f(x) * h / 2;
      for (auto& m : s) {
        m += v;
        v *= x;
      }
    }
  }
  return s;
}

// Composite 5-point Gauss-Legendre with tabulated nodes.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 200) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double h = (b - a) / panels;
  long double s = 0.0L;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) s += ws[i] * f(c + 0.5 * h * xs[i]);
  }
  return static_cast<double>(s * 0.5L * h);
}

// Leibniz expansion; fine for n <= 7.
inline double permutation_det(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long double det = 0.0L;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    long double term = (inversions % 2 == 0) ? 1.0L : -1.0L;
    for (std::size_t i = 0; i < n; ++i) term *= m[i][perm[i]];
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(det);
}

// Monic Legendre polynomials on [-1, 1] from the three-term recurrence
// P_{k+1} = x P_k - k^2 / (4k^2 - 1) P_{k-1}; ascending coefficients.
inline std::vector<double> monic_legendre(int n) {
  std::vector<long double> pm{1.0L}, p{0.0L, 1.0L};
  if (n == 0) return {1.0};
  for (int k = 1; k < n; ++k) {
    std::vector<long double> next(static_cast<std::size_t>(k) + 2, 0.0L);
    for (std::size_t i = 0; i < p.size(); ++i) next[i + 1] += p[i];
    const long double b = static_cast<long double>(k) * k / (4.0L * k * k - 1.0L);
    for (std::size_t i = 0; i < pm.size(); ++i) next[i] -= b * pm[i];
    pm = p;
    p = next;
  }
  return std::vector<double>(p.begin(), p.end());
}

inline double horner(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

// Solve a small dense system by Gaussian elimination in long double.
inline std::vector<double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const long double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = static_cast<double>(s / a[i][i]);
  }
  return x;
}

// Arcsine CDF on [-1, 1].
inline double arcsine_cdf(double x) {
  x = std::clamp(x, -1.0, 1.0);
  return 0.5 + std::asin(x) / M_PI;
}

}  // namespace oracle
