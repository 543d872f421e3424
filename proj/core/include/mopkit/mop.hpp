#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mopkit/polynomial.hpp"
#include "mopkit/weights.hpp"

namespace mopkit {

/// Multi-index (n_1, ..., n_p). Indices into it are zero-based.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> parts);
  MultiIndex(std::initializer_list<int> parts) : MultiIndex(std::vector<int>(parts)) {}

  /// n_j = round(r_j n) with largest-remainder correction so that sum n_j = n.
  static MultiIndex along_ray(std::span<const double> ratios, int n);

  std::size_t p() const noexcept { return parts_.size(); }
  int operator[](std::size_t j) const { return parts_.at(j); }
  const std::vector<int>& parts() const noexcept { return parts_; }
  int total() const noexcept { return total_; }
  /// N_j = n_1 + ... + n_j, with N_0 = 0.
  int prefix(std::size_t j) const;
  /// Zero-based basis position k -> (weight j, power i) with k = N_j + i.
  std::pair<std::size_t, int> locate(int k) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> parts_;
  int total_ = 0;
};

/// Hard cap on |n| for polynomial construction.
inline constexpr int kMaxDegree = 30;
/// Condition estimates above this flag a result as ill-conditioned.
inline constexpr double kConditionWarning = 1e12;
/// D_n counts as zero when the reciprocal condition estimate of the system
/// matrix falls below this value (numerical rank deficiency).
inline constexpr double kSingularityRcond = 1e-15;

/// M_n: entry (r, N_j + i) = c^{(j)}_{r + i}, r = 0 .. rows-1.
struct HankelBlockMatrix {
  Eigen::MatrixXd matrix;
  MultiIndex nvec;
  AffineFrame frame;
  std::vector<std::pair<int, int>> column_ranges;  // [begin, end) per weight
};

/// Assembles the block Hankel matrix from a monomial moment table. `rows`
/// defaults to n; rows = n + 1 gives the bordered matrix M_{n+1,n}.
HankelBlockMatrix block_hankel(const MomentTable& mt, const MultiIndex& nvec, int rows = -1);

struct NormalityReport {
  double determinant = 0.0;
  double log_abs_determinant = 0.0;
  int sign = 0;
  double condition_estimate = 0.0;  // 1-norm estimate
  double hadamard_ratio = 0.0;      // |D| / prod of row norms, in [0, 1]
  bool singular = false;
};

/// LU with partial pivoting; zero determinant is a valid result.
NormalityReport analyze_square(const Eigen::MatrixXd& m);
NormalityReport normality_determinant(const HankelBlockMatrix& m);

/// Gram matrix of the table basis against the g-functions:
/// entry (r, N_j + i) = int pi_r(t) pi_i(t) w_j(x) dx, r = 0 .. rows-1.
/// Equals block_hankel(...).matrix for monomial tables.
Eigen::MatrixXd moment_gram(const MomentTable& mt, const MultiIndex& nvec, int rows = -1);

struct TypeIIResult {
  Polynomial polynomial;  // monic of degree n, coefficients in the table frame
  NormalityReport normality;
  bool ill_conditioned = false;
};

/// Type II MOP by solving the transposed moment system. Works with monomial
/// and Legendre moment tables. Throws NonNormalIndexError at non-normal
/// indices and ArgumentError when the table is too short or n > kMaxDegree.
TypeIIResult type2_mop(const MomentTable& mt, const MultiIndex& nvec);

/// Type II MOP from the bordered determinant expansion divided by D_n
/// (monomial tables only; intended for small n as an independent route).
Polynomial type2_mop_determinantal(const MomentTable& mt, const MultiIndex& nvec);

struct TypeISystem {
  MultiIndex nvec;
  std::vector<Polynomial> A;  // deg A^(j) = n_j - 1; zero polynomial when n_j = 0
  NormalityReport normality;
  bool ill_conditioned = false;

  /// Q(x) = sum_j A^(j)(x) w_j(x).
  double linear_form(const WeightSystem& ws, double x) const;
};

TypeISystem type1_mop(const MomentTable& mt, const MultiIndex& nvec);

/// Real roots from companion-matrix eigenvalues (balanced), Newton-polished
/// and sorted. Eigenvalues with |Im| <= 1e-8 * max(1, |lambda|) are projected
/// onto the real axis; roots closer than `dedupe_tol` are merged.
/// Throws RefinementError when a polished root leaves |P| above tolerance.
std::vector<double> poly_roots(const Polynomial& p, double dedupe_tol = 0.0);

struct ResidualOptions {
  int panels = 8;
  int points = 40;
};

/// r[j][k] = int P(x) t(x)^k w_j(x) dx for k < n_j, t in the canonical frame
/// of `ws`, by composite Gauss-Legendre quadrature (independent of the moment
/// path used for construction).
std::vector<std::vector<double>> orthogonality_residuals(const Polynomial& p, const WeightSystem& ws,
                                                         const MultiIndex& nvec,
                                                         const ResidualOptions& opt = {});

/// r_k = s^{n-1} int t^k Q(x) dx - delta_{k,n-1}, k = 0 .. n-1, where s is the
/// canonical frame scale. Zero exactly when the type I conditions hold.
std::vector<double> type1_residuals(const TypeISystem& sys, const WeightSystem& ws,
                                    const ResidualOptions& opt = {});

/// int Q(x) / (z - x) dx by composite quadrature.
std::complex<double> linear_form_cauchy_transform(const TypeISystem& sys, const WeightSystem& ws,
                                                  std::complex<double> z, const ResidualOptions& opt = {});

/// Moments needed to build MOPs for nvec (order 2n, covering the bordered formula).
int required_moment_order(const MultiIndex& nvec);

}  // namespace mopkit
