#include "mopkit/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mopkit {

// ---------------------------------------------------------------------------
// DiscreteMeasure
// ---------------------------------------------------------------------------

DiscreteMeasure DiscreteMeasure::uniform(const Interval& iv, int cells, double total) {
  if (cells < 1) throw ArgumentError("grid needs at least one cell");
  DiscreteMeasure m;
  m.spacing = iv.length() / cells;
  m.grid.resize(static_cast<std::size_t>(cells));
  m.masses.assign(static_cast<std::size_t>(cells), total / cells);
  for (int i = 0; i < cells; ++i) m.grid[static_cast<std::size_t>(i)] = iv.a() + (i + 0.5) * m.spacing;
  return m;
}

double DiscreteMeasure::total_mass() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

DiscreteMeasure DiscreteMeasure::normalized() const {
  const double t = total_mass();
  if (!(t > 0.0)) throw ArgumentError("cannot normalize a zero measure");
  DiscreteMeasure m = *this;
  for (double& v : m.masses) v /= t;
  return m;
}

double DiscreteMeasure::cdf(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size() && grid[i] <= x; ++i) s += masses[i];
  return s;
}

std::vector<double> DiscreteMeasure::density() const {
  if (!(spacing > 0.0)) throw ArgumentError("density needs a grid spacing");
  std::vector<double> d(masses);
  for (double& v : d) v /= spacing;
  return d;
}

std::vector<double> DiscreteMeasure::cumulative() const {
  std::vector<double> c(masses.size());
  std::partial_sum(masses.begin(), masses.end(), c.begin());
  return c;
}

// ---------------------------------------------------------------------------
// Interaction matrices and energies
// ---------------------------------------------------------------------------

double InteractionMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool InteractionMatrix::positive_definite() const {
  if (c.rows() == 0 || c.rows() != c.cols()) return false;
  if (!c.isApprox(c.transpose(), 0.0)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  return llt.info() == Eigen::Success;
}

InteractionMatrix interaction_matrix(SystemKind kind, int p) {
  if (p < 1) throw ArgumentError("interaction matrix needs p >= 1");
  InteractionMatrix m;
  m.c = Eigen::MatrixXd::Identity(p, p);
  if (kind == SystemKind::angelesco) {
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < p; ++k)
        if (j != k) m.c(j, k) = 0.5;
  } else if (kind == SystemKind::nikishin) {
    for (int j = 0; j + 1 < p; ++j) m.c(j, j + 1) = m.c(j + 1, j) = -0.5;
  } else {
    throw ArgumentError("interaction matrices are defined for Angelesco and Nikishin systems");
  }
  return m;
}

double log_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu, EnergyMode mode) {
  if (mode == EnergyMode::reduced && mu.grid.size() != nu.grid.size())
    throw ArgumentError("reduced energy pairs the atoms of one measure with themselves");
  const double floor = 0.5 * std::max(mu.spacing, nu.spacing);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.grid.size(); ++i) {
    if (mu.masses[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < nu.grid.size(); ++j) {
      if (mode == EnergyMode::reduced && i == j) continue;
      if (nu.masses[j] == 0.0) continue;
      double d = std::abs(mu.grid[i] - nu.grid[j]);
      if (d == 0.0) {
        if (mode != EnergyMode::floored || floor == 0.0) {
          std::ostringstream os;
          os << "coincident atoms at " << mu.grid[i] << " make the logarithmic energy infinite";
          throw DomainError(os.str());
        }
        d = floor;
      }
      row -= nu.masses[j] * std::log(d);
    }
    s += mu.masses[i] * row;
  }
  return s;
}

double ExternalField::operator()(double x) const {
  double s = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * x + *it;
  return s;
}

bool ExternalField::is_zero() const noexcept {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

double energy_functional(const std::vector<DiscreteMeasure>& measures, const InteractionMatrix& c,
                         const std::vector<ExternalField>& fields) {
  const std::size_t p = measures.size();
  if (c.p() != p) throw ArgumentError("interaction matrix dimension must equal the number of measures");
  if (!fields.empty() && fields.size() != p) throw ArgumentError("need one external field per measure");
  double e = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) {
      const double cjk = c.c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      if (cjk != 0.0) e += cjk * log_energy(measures[j], measures[k], EnergyMode::floored);
    }
    if (!fields.empty())
      for (std::size_t i = 0; i < measures[j].grid.size(); ++i)
        e += fields[j](measures[j].grid[i]) * measures[j].masses[i];
  }
  return e;
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

namespace {

void check_ratios(const std::vector<double>& r, std::size_t p) {
  if (r.size() != p) throw ArgumentError("need one ratio per interval");
  double s = 0.0;
  for (double v : r) {
    if (!(v > 0.0 && v < 1.0) && !(p == 1 && v == 1.0)) throw ArgumentError("ratios must lie in (0, 1)");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ArgumentError("ratios must sum to 1");
}

}  // namespace

EquilibriumProblem EquilibriumProblem::angelesco(std::vector<Interval> intervals, std::vector<double> ratios,
                                                 int grid) {
  check_ratios(ratios, intervals.size());
  EquilibriumProblem prob;
  prob.interaction = interaction_matrix(SystemKind::angelesco, static_cast<int>(intervals.size()));
  prob.intervals = std::move(intervals);
  prob.masses = std::move(ratios);
  prob.grid = grid;
  return prob;
}

EquilibriumProblem EquilibriumProblem::nikishin(std::vector<Interval> intervals, std::vector<double> ratios,
                                                int grid) {
  check_ratios(ratios, intervals.size());
  EquilibriumProblem prob;
  prob.interaction = interaction_matrix(SystemKind::nikishin, static_cast<int>(intervals.size()));
  prob.masses.assign(ratios.size(), 0.0);
  double tail = 0.0;
  for (std::size_t j = ratios.size(); j-- > 0;) {
    tail += ratios[j];
    prob.masses[j] = tail;
  }
  prob.intervals = std::move(intervals);
  prob.grid = grid;
  return prob;
}

void EquilibriumProblem::validate() const {
  const std::size_t p = intervals.size();
  if (p == 0) throw ArgumentError("equilibrium problem needs at least one interval");
  if (masses.size() != p) throw ArgumentError("need one mass per interval");
  for (double m : masses)
    if (!(m > 0.0)) throw ArgumentError("component masses must be positive");
  if (interaction.p() != p) throw ArgumentError("interaction matrix dimension must equal p");
  if (!interaction.positive_definite()) throw ConstructionError("interaction matrix is not positive definite");
  if (!fields.empty() && fields.size() != p) throw ArgumentError("need one external field per component");
  if (grid < 2) throw ArgumentError("grid needs at least two cells");
  if (max_iterations < 1) throw ArgumentError("iteration cap must be positive");
}

// ---------------------------------------------------------------------------
// Minimizer
// ---------------------------------------------------------------------------

EquilibriumResult minimize_equilibrium(const EquilibriumProblem& prob) {
  prob.validate();
  const std::size_t p = prob.intervals.size();
  const Eigen::Index m = prob.grid;
  const Eigen::Index total = m * static_cast<Eigen::Index>(p);

  std::vector<DiscreteMeasure> start;
  for (std::size_t j = 0; j < p; ++j) start.push_back(DiscreteMeasure::uniform(prob.intervals[j], prob.grid, prob.masses[j]));

  Eigen::VectorXd x(total), h(total), v = Eigen::VectorXd::Zero(total), mass(total);
  for (std::size_t j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index a = static_cast<Eigen::Index>(j) * m + i;
      x[a] = start[j].grid[static_cast<std::size_t>(i)];
      h[a] = start[j].spacing;
      mass[a] = start[j].masses[static_cast<std::size_t>(i)];
      if (!prob.fields.empty()) v[a] = prob.fields[j](x[a]);
    }

  Eigen::MatrixXd kernel(total, total);
  for (Eigen::Index b = 0; b < total; ++b) {
    const auto kb = static_cast<Eigen::Index>(b / m);
    for (Eigen::Index a = 0; a < total; ++a) {
      const auto ka = static_cast<Eigen::Index>(a / m);
      const double c = prob.interaction.c(ka, kb);
      if (c == 0.0) {
        kernel(a, b) = 0.0;
        continue;
      }
      double d = std::abs(x[a] - x[b]);
      if (d == 0.0) d = 0.25 * (h[a] + h[b]);
      kernel(a, b) = -c * std::log(d);
    }
  }

  auto project = [&](Eigen::VectorXd& y) {
    for (std::size_t j = 0; j < p; ++j) {
      auto seg = y.segment(static_cast<Eigen::Index>(j) * m, m);
      seg *= prob.masses[j] / seg.sum();
    }
  };

  EquilibriumResult res;
  Eigen::VectorXd km = kernel * mass;
  double energy = mass.dot(km) + v.dot(mass);
  res.energy_history.push_back(energy);
  double eta = 1.0;
  Eigen::VectorXd grad(total), trial(total), ktrial(total);
  int it = 0;
  for (; it < prob.max_iterations; ++it) {
    grad = 2.0 * km + v;
    double trial_energy = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t j = 0; j < p; ++j) {
        const Eigen::Index off = static_cast<Eigen::Index>(j) * m;
        const double gmin = grad.segment(off, m).minCoeff();
        for (Eigen::Index i = off; i < off + m; ++i) trial[i] = mass[i] * std::exp(-eta * (grad[i] - gmin));
      }
      project(trial);
      ktrial.noalias() = kernel * trial;
      trial_energy = trial.dot(ktrial) + v.dot(trial);
      double kl = 0.0;
      for (Eigen::Index i = 0; i < total; ++i)
        if (trial[i] > 0.0) kl += trial[i] * std::log(trial[i] / mass[i]);
      if (trial_energy <= energy + grad.dot(trial - mass) + kl / eta + 1e-15 * std::abs(energy)) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    const double decrease = energy - trial_energy;
    if (trial_energy <= energy) {
      mass.swap(trial);
      km.swap(ktrial);
      energy = trial_energy;
      res.energy_history.push_back(energy);
    }
    eta = std::min(eta * 1.5, 1e6);
    if (decrease <= prob.relative_tolerance * std::max(std::abs(energy), 1e-300)) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;
  res.energy = energy;

  grad = 2.0 * km + v;
  res.kkt_residual = 0.0;
  res.min_off_support_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p; ++j) {
    const Eigen::Index off = static_cast<Eigen::Index>(j) * m;
    const double mean = grad.segment(off, m).dot(mass.segment(off, m)) / prob.masses[j];
    const double thr = 1e-3 * prob.masses[j] / static_cast<double>(m);
    std::vector<double> pot(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double g = grad[off + i];
      pot[static_cast<std::size_t>(i)] = g;
      if (mass[off + i] >= thr)
        res.kkt_residual = std::max(res.kkt_residual, std::abs(g - mean));
      else
        res.min_off_support_gap = std::min(res.min_off_support_gap, g - mean);
    }
    res.potentials.push_back(std::move(pot));
    DiscreteMeasure mu = start[j];
    for (Eigen::Index i = 0; i < m; ++i) mu.masses[static_cast<std::size_t>(i)] = mass[off + i];
    res.measures.push_back(std::move(mu));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Zero counting and distances
// ---------------------------------------------------------------------------

std::vector<DiscreteMeasure> zero_counting_measure(const std::vector<double>& roots, int n,
                                                   const std::vector<Interval>& intervals, double tol) {
  if (n < 1) throw ArgumentError("zero counting needs n >= 1");
  std::vector<DiscreteMeasure> out(intervals.size());
  for (double r : roots) {
    std::size_t j = 0;
    while (j < intervals.size() && !(intervals[j].a() - tol <= r && r <= intervals[j].b() + tol)) ++j;
    if (j == intervals.size()) {
      std::ostringstream os;
      os << "root " << r << " lies outside every interval";
      throw DomainError(os.str());
    }
    out[j].grid.push_back(r);
    out[j].masses.push_back(1.0 / n);
  }
  for (auto& m : out) {
    std::vector<std::size_t> order(m.grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m.grid[a] < m.grid[b]; });
    DiscreteMeasure s;
    for (std::size_t i : order) {
      s.grid.push_back(m.grid[i]);
      s.masses.push_back(m.masses[i]);
    }
    m = std::move(s);
  }
  return out;
}

double kolmogorov_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (std::abs(mu.total_mass() - nu.total_mass()) > 1e-9)
    throw ArgumentError("Kolmogorov distance needs equal total masses");
  std::size_t i = 0, j = 0;
  double fm = 0.0, fn = 0.0, sup = 0.0;
  while (i < mu.grid.size() || j < nu.grid.size()) {
    double x;
    if (j == nu.grid.size() || (i < mu.grid.size() && mu.grid[i] <= nu.grid[j]))
      x = mu.grid[i];
    else
      x = nu.grid[j];
    while (i < mu.grid.size() && mu.grid[i] <= x) fm += mu.masses[i++];
    while (j < nu.grid.size() && nu.grid[j] <= x) fn += nu.masses[j++];
    sup = std::max(sup, std::abs(fm - fn));
  }
  return sup;
}

}  // namespace mopkit
