#include "mopkit/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace mopkit {

Polynomial::Polynomial(std::vector<double> local_coeffs, AffineFrame frame)
    : a_(std::move(local_coeffs)), frame_(frame) {
  while (!a_.empty() && a_.back() == 0.0) a_.pop_back();
}

double Polynomial::operator()(double x) const {
  const double t = frame_.to_local(x);
  double s = 0.0;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) s = s * t + *it;
  return s;
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const {
  const std::complex<double> t = (z - frame_.center) / frame_.scale;
  std::complex<double> s = 0.0;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) s = s * t + *it;
  return s;
}

double Polynomial::leading_coefficient() const {
  if (a_.empty()) return 0.0;
  return a_.back() / std::pow(frame_.scale, degree());
}

std::vector<double> Polynomial::coefficients() const {
  if (frame_.is_identity()) return a_;
  // p(x) = sum_i a_i ((x - c)/s)^i; expand with a Horner scheme in x.
  const double c = frame_.center, s = frame_.scale;
  std::vector<double> out;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) {
    // out <- out * (x - c)/s + a_i
    std::vector<double> next(out.size() + 1, 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
      next[k + 1] += out[k] / s;
      next[k] -= out[k] * c / s;
    }
    next[0] += *it;
    out = std::move(next);
  }
  return out;
}

Polynomial Polynomial::in_frame(const AffineFrame& target) const {
  if (target == frame_) return *this;
  // t_old = (target.scale * t_new + target.center - c) / s
  const double alpha = target.scale / frame_.scale;
  const double beta = (target.center - frame_.center) / frame_.scale;
  std::vector<double> out;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) {
    std::vector<double> next(out.size() + 1, 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
      next[k + 1] += out[k] * alpha;
      next[k] += out[k] * beta;
    }
    next[0] += *it;
    out = std::move(next);
  }
  return Polynomial(std::move(out), target);
}

double legendre_leading_coefficient(int n) {
  double k = 1.0;
  for (int j = 1; j <= n; ++j) k *= (2.0 * j - 1.0) / j;
  return k;
}

std::vector<double> legendre_to_monomial(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  std::vector<double> pm(n, 0.0), p(n, 0.0);  // P_{k-1}, P_k
  p[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i <= k; ++i) out[i] += c[k] * p[i];
    if (k + 1 == n) break;
    // P_{k+1} = ((2k+1) t P_k - k P_{k-1}) / (k+1)
    std::vector<double> next(n, 0.0);
    const double kk = static_cast<double>(k);
    for (std::size_t i = 0; i <= k; ++i) next[i + 1] += (2.0 * kk + 1.0) * p[i] / (kk + 1.0);
    for (std::size_t i = 0; i + 1 <= k; ++i) next[i] -= kk * pm[i] / (kk + 1.0);
    pm = std::move(p);
    p = std::move(next);
  }
  return out;
}

std::vector<double> legendre_product(int m, int n) {
  if (m < 0 || n < 0) throw ArgumentError("Legendre degrees must be non-negative");
  // A_k = (1/2)_k / k!
  const int top = m + n;
  std::vector<double> A(static_cast<std::size_t>(top) + 1, 1.0);
  for (int k = 1; k <= top; ++k) A[k] = A[k - 1] * (2.0 * k - 1.0) / (2.0 * k);
  const int rmax = std::min(m, n);
  std::vector<double> g(static_cast<std::size_t>(rmax) + 1);
  for (int r = 0; r <= rmax; ++r) {
    const double num = A[m - r] * A[r] * A[n - r];
    g[r] = num / A[m + n - r] * (2.0 * (m + n) - 4.0 * r + 1.0) / (2.0 * (m + n) - 2.0 * r + 1.0);
  }
  return g;
}

}  // namespace mopkit
