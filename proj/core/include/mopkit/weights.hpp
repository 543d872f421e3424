#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mopkit/interval.hpp"
#include "mopkit/quadrature.hpp"

namespace mopkit {

// ---------------------------------------------------------------------------
// Weight specifications
// ---------------------------------------------------------------------------

struct ConstantFamily {
  friend bool operator==(const ConstantFamily&, const ConstantFamily&) = default;
};

/// (b - x)^alpha (x - a)^beta on [a, b].
struct JacobiFamily {
  double alpha = 0.0;
  double beta = 0.0;
  friend bool operator==(const JacobiFamily&, const JacobiFamily&) = default;
};

/// exp(-sum_k c_k x^k).
struct ExpPolyFamily {
  std::vector<double> coeffs;
  friend bool operator==(const ExpPolyFamily&, const ExpPolyFamily&) = default;
};

using WeightFamily = std::variant<ConstantFamily, JacobiFamily, ExpPolyFamily>;

struct WeightSpec {
  WeightFamily family;
  Interval interval;
  double factor = 1.0;  // overall positive multiplier

  static WeightSpec constant(Interval iv, double factor = 1.0) { return {ConstantFamily{}, iv, factor}; }
  static WeightSpec jacobi(Interval iv, double alpha, double beta) {
    return {JacobiFamily{alpha, beta}, iv, 1.0};
  }
  static WeightSpec exp_poly(Interval iv, std::vector<double> c) {
    return {ExpPolyFamily{std::move(c)}, iv, 1.0};
  }

  /// Throws ArgumentError for non-integrable exponents or a non-positive factor.
  void validate() const;
  std::string describe() const;
};

// ---------------------------------------------------------------------------
// Weight: an elementary family, optionally multiplied by a Markov function
// of a generator weight (the Nikishin lift).
// ---------------------------------------------------------------------------

enum class MarkovSign { plus = 1, minus = -1 };

class Weight {
 public:
  explicit Weight(WeightSpec spec);

  /// base(x) * sign * int generator(y) / (x - y) dy on base's support.
  static Weight markov_lifted(WeightSpec base, Weight generator, MarkovSign sign,
                              double inner_tol = 1e-13);

  /// Value at x; zero outside the support.
  double operator()(double x) const;
  /// Value at a node whose distances are measured to the ends of support().
  double operator()(const Abscissa& p) const;

  const Interval& support() const noexcept { return spec_.interval; }
  const WeightSpec& base_spec() const noexcept { return spec_; }
  EndpointSingularity singularity() const noexcept;
  bool is_lifted() const noexcept { return lift_ != nullptr; }
  /// Generator of the Markov factor; requires is_lifted().
  const Weight& generator() const;
  MarkovSign lift_sign() const;

  /// Same weight multiplied by c > 0.
  Weight scaled(double c) const;

 private:
  struct Lift;
  WeightSpec spec_;
  std::shared_ptr<const Lift> lift_;
};

/// sign * int v(y) / (x - y) dy for x off the support of v.
/// Throws DomainError when x lies in the closed support.
double stieltjes_transform(const Weight& v, double x, MarkovSign sign, double tol = 1e-13);

/// Sign making the Markov function positive on a base interval: plus when the
/// generator interval lies to the left of the base interval.
MarkovSign markov_sign(const Interval& base, const Interval& generator);

// ---------------------------------------------------------------------------
// Weight systems
// ---------------------------------------------------------------------------

enum class SystemKind { general, angelesco, nikishin };

std::string to_string(SystemKind kind);

class WeightSystem {
 public:
  SystemKind kind() const noexcept { return kind_; }
  std::size_t p() const noexcept { return weights_.size(); }
  const std::vector<Weight>& weights() const noexcept { return weights_; }
  const Weight& weight(std::size_t j) const { return weights_.at(j); }

  /// Angelesco: the supports. Nikishin: Gamma_1 ... Gamma_p (weights live on Gamma_1).
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  /// Nikishin generator weights on Gamma_2 (v_2 ... v_p); empty otherwise.
  const std::vector<Weight>& generators() const noexcept { return generators_; }

  /// Disjoint pieces whose union contains every weight support, sorted.
  std::vector<Interval> integration_pieces() const;
  /// Smallest interval containing all weight supports.
  Interval hull() const;

  /// Same system with weight j multiplied by c.
  WeightSystem with_scaled_weight(std::size_t j, double c) const;
  /// Same system with weights reordered by `order` (a permutation).
  WeightSystem permuted(const std::vector<std::size_t>& order) const;

  friend WeightSystem build_general(std::vector<WeightSpec> specs);
  friend WeightSystem build_angelesco(std::vector<WeightSpec> specs);
  friend WeightSystem build_nikishin(WeightSpec w1, std::vector<WeightSpec> generators);

 private:
  SystemKind kind_ = SystemKind::general;
  std::vector<Weight> weights_;
  std::vector<Interval> intervals_;
  std::vector<Weight> generators_;
};

/// Endpoint singularities of the weights that start or end at the ends of
/// `piece` (the strongest exponent wins).
EndpointSingularity piece_singularity(const WeightSystem& ws, const Interval& piece);

/// Weights with arbitrary supports (AT systems, single weights).
WeightSystem build_general(std::vector<WeightSpec> specs);

/// Weights on pairwise disjoint intervals, relabelled left to right. Touching
/// endpoints are allowed; overlapping interiors raise ConstructionError.
WeightSystem build_angelesco(std::vector<WeightSpec> specs);

/// Nikishin system on Gamma_1 = w1.interval. `generators[0]` lives on Gamma_2,
/// `generators[1]` on Gamma_3, and so on; for p >= 3 the generators are
/// themselves assembled recursively into a Nikishin system on Gamma_2.
WeightSystem build_nikishin(WeightSpec w1, std::vector<WeightSpec> generators);

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// Affine change of variable t = (x - center) / scale.
struct AffineFrame {
  double center = 0.0;
  double scale = 1.0;

  double to_local(double x) const noexcept { return (x - center) / scale; }
  double to_global(double t) const noexcept { return center + scale * t; }
  bool is_identity() const noexcept { return center == 0.0 && scale == 1.0; }

  /// Maps `hull` into [-1, 1] with a power-of-two scale, so scale^n is exact.
  static AffineFrame for_hull(const Interval& hull);

  friend bool operator==(const AffineFrame&, const AffineFrame&) = default;
};

/// Canonical frame of a system: AffineFrame::for_hull(ws.hull()).
AffineFrame canonical_frame(const WeightSystem& ws);

/// Polynomial basis the moments are taken against: t^k or Legendre P_k(t).
enum class MomentBasis { monomial, legendre };

struct MomentTable {
  MomentBasis basis = MomentBasis::monomial;
  AffineFrame frame;
  /// c[j][k] = int pi_k(t(x)) w_j(x) dx.
  std::vector<std::vector<double>> c;
  double tolerance = 0.0;
  double max_error = 0.0;  // largest achieved quadrature error estimate

  std::size_t p() const noexcept { return c.size(); }
  /// Highest order available for every weight (-1 when empty).
  int max_order() const noexcept;
};

struct MomentOptions {
  MomentBasis basis = MomentBasis::monomial;
  std::optional<AffineFrame> frame;  // canonical frame when empty
  double tol = 1e-12;
  int max_segments = 4000;
};

/// c_k^{(j)} = int x^k w_j(x) dx for k = 0 .. k_max (identity frame,
/// monomial basis). Throws NumericError on quadrature non-convergence.
std::vector<double> moments(const WeightSystem& ws, std::size_t j, int k_max, double tol = 1e-12);

/// All weights, any basis and frame.
MomentTable moment_table(const WeightSystem& ws, int k_max, const MomentOptions& opt = {});

/// Values pi_0(t) ... pi_k_max(t) of the chosen basis.
void basis_values(MomentBasis basis, double t, std::span<double> out);

}  // namespace mopkit
