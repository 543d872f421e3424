#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mopkit/weights.hpp"

namespace mopkit {

/// Real polynomial stored in the local variable t = (x - center) / scale of an
/// affine frame: p(x) = sum_i a_i t(x)^i. The identity frame gives ordinary
/// monomial coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> local_coeffs, AffineFrame frame = {});

  /// Ascending x-monomial coefficients, identity frame.
  static Polynomial from_coefficients(std::vector<double> coeffs) { return Polynomial(std::move(coeffs)); }

  int degree() const noexcept { return static_cast<int>(a_.size()) - 1; }
  bool is_zero() const noexcept { return a_.empty(); }
  const std::vector<double>& local_coefficients() const noexcept { return a_; }
  const AffineFrame& frame() const noexcept { return frame_; }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;

  /// Leading coefficient with respect to x. Exact for power-of-two scales.
  double leading_coefficient() const;

  /// Ascending x-monomial coefficients (binomial expansion of the frame).
  std::vector<double> coefficients() const;

  /// Same polynomial re-expressed in another frame.
  Polynomial in_frame(const AffineFrame& target) const;

 private:
  std::vector<double> a_;  // trailing zeros trimmed
  AffineFrame frame_;
};

/// Leading coefficient of the Legendre polynomial P_n: (2n)! / (2^n (n!)^2).
double legendre_leading_coefficient(int n);

/// Ascending monomial coefficients of sum_k c_k P_k(t).
std::vector<double> legendre_to_monomial(std::span<const double> c);

/// Coefficients g_r with P_m(t) P_n(t) = sum_r g_r P_{m+n-2r}(t), r = 0..min(m,n)
/// (Adams-Neumann linearization).
std::vector<double> legendre_product(int m, int n);

}  // namespace mopkit
