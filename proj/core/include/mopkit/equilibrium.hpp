#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mopkit/interval.hpp"
#include "mopkit/weights.hpp"

namespace mopkit {

/// Nonnegative masses on a sorted grid. `spacing` is the cell width h of a
/// midpoint grid (0 for atomic measures such as zero-counting measures).
struct DiscreteMeasure {
  std::vector<double> grid;
  std::vector<double> masses;
  double spacing = 0.0;

  /// Midpoints of `cells` equal cells of `iv`, each carrying mass total / cells.
  static DiscreteMeasure uniform(const Interval& iv, int cells, double total);

  double total_mass() const;
  /// Same atoms with masses scaled to total 1.
  DiscreteMeasure normalized() const;
  /// Mass of (-inf, x].
  double cdf(double x) const;
  /// masses / spacing (requires spacing > 0).
  std::vector<double> density() const;
  std::vector<double> cumulative() const;
};

struct InteractionMatrix {
  Eigen::MatrixXd c;

  std::size_t p() const noexcept { return static_cast<std::size_t>(c.rows()); }
  double min_eigenvalue() const;
  bool positive_definite() const;
};

/// Angelesco: 1 on the diagonal, 1/2 elsewhere. Nikishin: 1 on the diagonal,
/// -1/2 on the first off-diagonals. Throws ArgumentError for general kinds.
InteractionMatrix interaction_matrix(SystemKind kind, int p);

enum class EnergyMode {
  mutual,   // all pairs; coincident atoms are an error
  reduced,  // self-pairs (same index) skipped
  floored,  // coincident atoms separated by half the grid spacing
};

/// sum_i sum_j mu_i nu_j log(1 / |x_i - y_j|).
double log_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu, EnergyMode mode);

/// V(x) = sum_k coeffs[k] x^k, matching the exp_poly weight convention w = exp(-V).
struct ExternalField {
  std::vector<double> coeffs;

  double operator()(double x) const;
  bool is_zero() const noexcept;
};

/// sum_jk c_jk I(mu_j, mu_k) + sum_j int V_j dmu_j with floored self-energies.
/// `fields` may be empty (no external field).
double energy_functional(const std::vector<DiscreteMeasure>& measures, const InteractionMatrix& c,
                         const std::vector<ExternalField>& fields = {});

struct EquilibriumProblem {
  std::vector<Interval> intervals;
  std::vector<double> masses;
  InteractionMatrix interaction;
  std::vector<ExternalField> fields;  // empty or one per component
  int grid = 2000;                    // cells per component
  int max_iterations = 20000;
  double relative_tolerance = 1e-10;

  /// Masses r_j on Gamma_j; requires sum r_j = 1.
  static EquilibriumProblem angelesco(std::vector<Interval> intervals, std::vector<double> ratios, int grid = 2000);
  /// Masses sum_{i >= j} r_i on Gamma_j; requires sum r_j = 1.
  static EquilibriumProblem nikishin(std::vector<Interval> intervals, std::vector<double> ratios, int grid = 2000);

  void validate() const;
};

struct EquilibriumResult {
  std::vector<DiscreteMeasure> measures;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Largest deviation of the effective potential from its mass-weighted mean
  /// where the density is above 1e-3 of uniform.
  double kkt_residual = 0.0;
  /// Smallest (potential - mean) over the remaining nodes; +inf if none.
  double min_off_support_gap = 0.0;
  std::vector<double> energy_history;
  /// Effective potentials 2 sum_k c_jk U^{mu_k} + V_j at the grid nodes.
  std::vector<std::vector<double>> potentials;
};

/// Exponentiated-gradient descent on the mass simplices with backtracking.
EquilibriumResult minimize_equilibrium(const EquilibriumProblem& prob);

/// Atoms of mass 1/n at the roots, grouped by interval (endpoint tolerance tol).
/// Throws DomainError for a root outside every interval.
std::vector<DiscreteMeasure> zero_counting_measure(const std::vector<double>& roots, int n,
                                                   const std::vector<Interval>& intervals, double tol = 1e-8);

/// sup_x |F_mu(x) - F_nu(x)| over the merged grid. Requires equal total mass.
double kolmogorov_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace mopkit
