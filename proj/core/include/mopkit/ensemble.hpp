#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mopkit/mop.hpp"
#include "mopkit/weights.hpp"

namespace mopkit {

/// Points x_1 ... x_n; densities are symmetric so no ordering is required.
using Configuration = std::vector<double>;

/// Determinant carried as sign and log of its modulus.
struct SignedLog {
  int sign = 0;  // 0 means the value is exactly zero
  double log_abs = -std::numeric_limits<double>::infinity();

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// ---------------------------------------------------------------------------
// Basis functions and determinants (zero-based indices throughout)
// ---------------------------------------------------------------------------

/// f_k(x) = x^k.
double basis_f(int k, double x);
/// g_k(x) = x^i w_j(x) where k = N_j + i.
double basis_g(const WeightSystem& ws, const MultiIndex& nvec, int k, double x);

/// Delta(X) = prod_{j<k} (x_k - x_j).
double vandermonde(std::span<const double> x);
/// Delta(X, Y) = prod_{k,j} (x_k - y_j).
double delta_cross(std::span<const double> x, std::span<const double> y);

/// Matrix G(r, k) = g_r(x_k), with t^i in place of x^i when a frame is given
/// (changes the determinant by a positive factor only).
Eigen::MatrixXd g_matrix(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                         const AffineFrame& frame = {});

/// det[g_j(x_k)]; exactly zero when two points coincide to machine precision.
double g_determinant(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x);
SignedLog g_determinant_log(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                            const AffineFrame& frame = {});

struct SignReport {
  int sign = 0;          // common sign of the nonzero determinants, 0 if none
  int trials = 0;
  int nonzero = 0;
  int violations = 0;    // nonzero determinants with the minority sign
  bool all_zero() const noexcept { return nonzero == 0; }
};

/// Samples strictly ordered tuples uniformly on the union of the supports and
/// tallies the sign of det[g_j(x_k)].
SignReport sign_constancy_check(const WeightSystem& ws, const MultiIndex& nvec, int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

/// log |det f| + log |det g| (unnormalized log density).
double log_joint_density_unnormalized(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x);
/// |det f det g|.
double joint_density_unnormalized(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x);
/// |det f det g| / (|D_n| n!). Throws NonNormalIndexError when determinant == 0.
double joint_density(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x, double determinant);

/// prod_i [prod w_i(X^(i)) Delta(X^(i))^2] prod_{i<j} |Delta(X^(j), X^(i))|; zero unless
/// exactly n_i points lie in Gamma_i.
double angelesco_density(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x);

/// prod w_1(x_k) prod v(y_j) Delta(X)^2 Delta(Y)^2 / |Delta(X, Y)| for a p = 2
/// Nikishin system with generator v on Gamma_2.
double nikishin_extended_density(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                                 std::span<const double> y);

/// n x n determinant with rows x^0 .. x^{n1-1} followed by 1/(x_k - y_j).
double cauchy_vandermonde_det(std::span<const double> x, std::span<const double> y, int n1);

struct MarginalizationReport {
  double max_relative_deviation = 0.0;
  int points = 0;
};

/// Compares (1/n_2!) int extended density dY with |det f det g| at `points`
/// configurations X drawn in Gamma_1, by tensor Gauss-Legendre over Gamma_2^{n_2}.
MarginalizationReport marginalization_check(const WeightSystem& ws, const MultiIndex& nvec, int points = 12,
                                            int nodes = 24, std::uint64_t seed = 7);

/// (1/n!) int ... int det[f] det[g] by tensor quadrature over the integration pieces.
double cauchy_binet_integral(const WeightSystem& ws, const MultiIndex& nvec, int nodes = 16);

// ---------------------------------------------------------------------------
// Correlation kernel
// ---------------------------------------------------------------------------

/// Biorthogonal functions phi_j = sum_r A(j, r) pi_r(t), psi_j = sum_k B(j, k) gamma_k,
/// with pi the Legendre basis in the canonical frame and gamma_{N_i + l} = pi_l(t) w_i.
/// Construction and evaluation run in quadruple precision; results are rounded.
class Kernel {
 public:
  int n() const noexcept { return nvec_.total(); }
  const MultiIndex& nvec() const noexcept { return nvec_; }
  const WeightSystem& system() const noexcept { return ws_; }
  const AffineFrame& frame() const noexcept { return frame_; }
  /// A and B rounded to double precision.
  const Eigen::MatrixXd& phi_coefficients() const noexcept { return a_; }
  const Eigen::MatrixXd& psi_coefficients() const noexcept { return b_; }
  /// max |A M B^T - I| at construction.
  double biorthogonality_error() const noexcept { return bio_err_; }
  /// Largest Gram matrix change under the last quadrature refinement.
  double gram_error() const noexcept { return gram_err_; }

  Eigen::VectorXd phi(double x) const;
  Eigen::VectorXd psi(double y) const;
  /// K_n(x, y) = sum_j phi_j(x) psi_j(y).
  double operator()(double x, double y) const;
  /// -det[[M, pi(x)], [gamma(y)^T, 0]] / det M, evaluated without A and B.
  double bordered(double x, double y) const;

 private:
  struct Data;
  friend Kernel biorthogonalize(const WeightSystem& ws, const MultiIndex& nvec);

  Kernel(WeightSystem ws, MultiIndex nvec, AffineFrame frame, std::shared_ptr<const Data> d);

  WeightSystem ws_;
  MultiIndex nvec_;
  AffineFrame frame_;
  std::shared_ptr<const Data> d_;
  Eigen::MatrixXd a_, b_;
  double bio_err_ = 0.0;
  double gram_err_ = 0.0;
};

/// Factors the Legendre Gram matrix as P M = L U and sets A = L^{-1} P,
/// B = U^{-T}. Throws NonNormalIndexError when M is singular and NumericError
/// when max |A M B^T - I| exceeds 1e-9.
Kernel biorthogonalize(const WeightSystem& ws, const MultiIndex& nvec);

double kernel_eval(const Kernel& k, double x, double y);

/// -det[[M, f(x)], [g(y)^T, 0]] / det M with the monomial matrix of block_hankel.
double kernel_eval_bordered(const HankelBlockMatrix& m, const WeightSystem& ws, double x, double y);

/// K_n(x, x) / n.
double mean_density(const Kernel& k, double x);

}  // namespace mopkit
