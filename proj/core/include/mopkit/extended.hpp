#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/float128.hpp>

#include "mopkit/mop.hpp"
#include "mopkit/polynomial.hpp"
#include "mopkit/weights.hpp"

namespace mopkit {

using quad = boost::multiprecision::float128;

/// Node in quadruple precision with its distances to the ends of a weight's support.
struct QuadAbscissa {
  quad x = 0;
  quad from_left = 0;
  quad to_right = 0;
};

/// w(x) in quadruple precision. Markov factors are integrated over the
/// generator support with a composite Gauss-Legendre rule.
quad weight_value_quad(const Weight& w, const QuadAbscissa& p);
quad weight_value_quad(const Weight& w, quad x);

/// m-point Gauss-Legendre nodes and weights on [-1, 1] in quadruple precision.
void gauss_legendre_quad(int m, std::vector<quad>& nodes, std::vector<quad>& weights);

/// Type I multiple orthogonal polynomials with moments, Gram matrix and solve
/// carried out in quadruple precision. Nikishin systems produce A_j whose
/// coefficients exceed the linear form by many orders of magnitude, and the
/// cancellation in Q = sum A_j w_j is only resolved at this precision.
class QuadTypeI {
 public:
  /// Throws NonNormalIndexError at non-normal indices, NumericError when the
  /// Gram matrix does not settle under panel doubling.
  static QuadTypeI solve(const WeightSystem& ws, const MultiIndex& nvec);

  const MultiIndex& nvec() const noexcept { return nvec_; }
  const AffineFrame& frame() const noexcept { return frame_; }
  /// Legendre coefficients of A_j in the frame variable t.
  const std::vector<quad>& legendre_coefficients(std::size_t j) const { return coeffs_.at(j); }
  /// Largest difference between the Gram matrices of the last two refinements.
  double gram_error() const noexcept { return gram_error_; }
  double condition_estimate() const noexcept { return condition_; }

  quad polynomial(std::size_t j, quad x) const;
  quad linear_form(const WeightSystem& ws, quad x) const;

  /// A_j rounded to double precision, in the frame.
  TypeISystem rounded() const;

 private:
  MultiIndex nvec_;
  AffineFrame frame_;
  std::vector<std::vector<quad>> coeffs_;
  double gram_error_ = 0.0;
  double condition_ = 0.0;
};

/// Largest |n| accepted by QuadTypeII.
inline constexpr int kMaxQuadDegree = 64;

/// Monic type II multiple orthogonal polynomial solved in quadruple precision
/// in the Legendre basis of the canonical frame. Reaches degrees where the
/// double precision moment system is too ill-conditioned (|n| > kMaxDegree).
class QuadTypeII {
 public:
  /// Throws NonNormalIndexError at non-normal indices, NumericError when the
  /// Gram matrix does not settle, ArgumentError for |n| > kMaxQuadDegree.
  static QuadTypeII solve(const WeightSystem& ws, const MultiIndex& nvec);

  const MultiIndex& nvec() const noexcept { return nvec_; }
  const AffineFrame& frame() const noexcept { return frame_; }
  int degree() const noexcept { return nvec_.total(); }
  /// c_0 .. c_n with P(x) = sum_k c_k P_k(t).
  const std::vector<quad>& legendre_coefficients() const noexcept { return coeffs_; }
  double gram_error() const noexcept { return gram_error_; }
  double condition_estimate() const noexcept { return condition_; }

  quad operator()(quad x) const;
  /// Real zeros, sorted: eigenvalues of the Legendre colleague matrix
  /// polished by Newton steps in quadruple precision. Throws RefinementError
  /// when polishing fails or two zeros merge.
  std::vector<double> real_roots() const;
  /// P rounded to double precision, in the frame.
  Polynomial rounded() const;

 private:
  MultiIndex nvec_;
  AffineFrame frame_;
  std::vector<quad> coeffs_;
  double gram_error_ = 0.0;
  double condition_ = 0.0;
};

/// r_k = int x^k Q(x) dx - delta_{k,n-1}, k = 0 .. n-1, accumulated in
/// quadruple precision with a composite Gauss-Legendre rule that differs from
/// the one used to build the Gram matrix.
std::vector<double> type1_residuals(const QuadTypeI& sys, const WeightSystem& ws, int panels = 48,
                                    int points = 24);

}  // namespace mopkit
