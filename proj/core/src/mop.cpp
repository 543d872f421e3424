#include "mopkit/mop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mopkit {

// ---------------------------------------------------------------------------
// MultiIndex
// ---------------------------------------------------------------------------

MultiIndex::MultiIndex(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ArgumentError("multi-index needs at least one component");
  for (int v : parts_)
    if (v < 0) throw ArgumentError("multi-index components must be non-negative");
  total_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

MultiIndex MultiIndex::along_ray(std::span<const double> ratios, int n) {
  if (ratios.empty()) throw ArgumentError("ray needs at least one ratio");
  if (n < 0) throw ArgumentError("ray degree must be non-negative");
  const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  if (!(sum > 0.0)) throw ArgumentError("ray ratios must have positive sum");
  std::vector<int> parts(ratios.size());
  std::vector<double> rem(ratios.size());
  int assigned = 0;
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    if (ratios[j] < 0.0) throw ArgumentError("ray ratios must be non-negative");
    const double exact = ratios[j] / sum * n;
    parts[j] = static_cast<int>(std::floor(exact));
    rem[j] = exact - parts[j];
    assigned += parts[j];
  }
  std::vector<std::size_t> order(ratios.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return rem[l] > rem[r]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++parts[order[k % order.size()]];
  return MultiIndex(std::move(parts));
}

int MultiIndex::prefix(std::size_t j) const {
  if (j > parts_.size()) throw ArgumentError("prefix index out of range");
  return std::accumulate(parts_.begin(), parts_.begin() + static_cast<std::ptrdiff_t>(j), 0);
}

std::pair<std::size_t, int> MultiIndex::locate(int k) const {
  if (k < 0 || k >= total_) throw ArgumentError("basis position out of range");
  int start = 0;
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    if (k < start + parts_[j]) return {j, k - start};
    start += parts_[j];
  }
  throw ArgumentError("basis position out of range");
}

int required_moment_order(const MultiIndex& nvec) { return 2 * nvec.total(); }

// ---------------------------------------------------------------------------
// Block Hankel matrix and normality
// ---------------------------------------------------------------------------

namespace {

void check_table(const MomentTable& mt, const MultiIndex& nvec, int needed) {
  if (mt.p() != nvec.p()) throw ArgumentError("moment table and multi-index disagree on p");
  for (std::size_t j = 0; j < mt.p(); ++j) {
    if (nvec[j] == 0) continue;
    const int have = static_cast<int>(mt.c[j].size()) - 1;
    const int need = needed + nvec[j] - 1;
    if (have < need) {
      std::ostringstream os;
      os << "moment table for weight " << j + 1 << " stops at order " << have << "; order " << need
         << " is required";
      throw ArgumentError(os.str());
    }
  }
}

// int pi_k pi_i w_j dx from the table.
double gram_entry(const MomentTable& mt, std::size_t j, int k, int i) {
  const auto& c = mt.c[j];
  if (mt.basis == MomentBasis::monomial) return c[static_cast<std::size_t>(k + i)];
  const std::vector<double> g = legendre_product(k, i);
  double s = 0.0;
  for (std::size_t r = 0; r < g.size(); ++r) s += g[r] * c[static_cast<std::size_t>(k + i - 2 * static_cast<int>(r))];
  return s;
}

// Rows (j, k) for k < n_j; columns i = 0 .. cols-1.
Eigen::MatrixXd type2_matrix(const MomentTable& mt, const MultiIndex& nvec, int cols) {
  const int n = nvec.total();
  Eigen::MatrixXd s(n, cols);
  int row = 0;
  for (std::size_t j = 0; j < nvec.p(); ++j)
    for (int k = 0; k < nvec[j]; ++k, ++row)
      for (int i = 0; i < cols; ++i) s(row, i) = gram_entry(mt, j, k, i);
  return s;
}

// Solve with one step of refinement whose residual is accumulated in long double.
Eigen::VectorXd refined_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(b);
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    long double acc = b[i];
    for (Eigen::Index k = 0; k < a.cols(); ++k) acc -= static_cast<long double>(a(i, k)) * x[k];
    r[i] = static_cast<double>(acc);
  }
  x += lu.solve(r);
  return x;
}

void check_degree(const MultiIndex& nvec) {
  if (nvec.total() < 1) throw ArgumentError("multi-index must have |n| >= 1");
  if (nvec.total() > kMaxDegree) {
    std::ostringstream os;
    os << "|n| = " << nvec.total() << " exceeds the supported maximum " << kMaxDegree;
    throw ArgumentError(os.str());
  }
}

void throw_if_singular(const NormalityReport& rep, const MultiIndex& nvec) {
  if (!rep.singular) return;
  std::ostringstream os;
  os << "multi-index (";
  for (std::size_t j = 0; j < nvec.p(); ++j) os << (j ? "," : "") << nvec[j];
  os << ") is not normal: D = " << rep.determinant << ", condition estimate " << rep.condition_estimate;
  throw NonNormalIndexError(os.str(), rep.determinant);
}

// Ascending t-monomial coefficients of sum_i b_i pi_i(t).
std::vector<double> to_monomial(MomentBasis basis, std::vector<double> b) {
  if (basis == MomentBasis::monomial) return b;
  return legendre_to_monomial(b);
}

double basis_leading(MomentBasis basis, int n) {
  return basis == MomentBasis::monomial ? 1.0 : legendre_leading_coefficient(n);
}

}  // namespace

HankelBlockMatrix block_hankel(const MomentTable& mt, const MultiIndex& nvec, int rows) {
  if (mt.basis != MomentBasis::monomial) throw ArgumentError("block_hankel needs a monomial moment table");
  const int n = nvec.total();
  if (rows < 0) rows = n;
  check_table(mt, nvec, rows - 1);
  HankelBlockMatrix h;
  h.nvec = nvec;
  h.frame = mt.frame;
  h.matrix.resize(rows, n);
  int col = 0;
  for (std::size_t j = 0; j < nvec.p(); ++j) {
    h.column_ranges.emplace_back(col, col + nvec[j]);
    for (int i = 0; i < nvec[j]; ++i, ++col)
      for (int r = 0; r < rows; ++r) h.matrix(r, col) = mt.c[j][static_cast<std::size_t>(r + i)];
  }
  return h;
}

NormalityReport analyze_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ArgumentError("determinant of a non-square matrix");
  NormalityReport rep;
  if (m.rows() == 0) {
    rep.determinant = 1.0;
    rep.sign = 1;
    rep.condition_estimate = 1.0;
    rep.hadamard_ratio = 1.0;
    return rep;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd& u = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  double logabs = 0.0;
  bool zero = false;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d == 0.0) {
      zero = true;
      break;
    }
    if (d < 0) sign = -sign;
    logabs += std::log(std::abs(d));
  }
  if (zero) {
    rep.sign = 0;
    rep.determinant = 0.0;
    rep.log_abs_determinant = -std::numeric_limits<double>::infinity();
    rep.condition_estimate = std::numeric_limits<double>::infinity();
    rep.singular = true;
    return rep;
  }
  double log_rows = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) log_rows += std::log(m.row(i).norm());
  rep.sign = sign;
  rep.log_abs_determinant = logabs;
  rep.determinant = sign * std::exp(logabs);
  rep.hadamard_ratio = std::exp(logabs - log_rows);
  const double rc = lu.rcond();
  rep.condition_estimate = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  rep.singular = !(rc >= kSingularityRcond);
  return rep;
}

NormalityReport normality_determinant(const HankelBlockMatrix& m) { return analyze_square(m.matrix); }

Eigen::MatrixXd moment_gram(const MomentTable& mt, const MultiIndex& nvec, int rows) {
  const int n = nvec.total();
  if (rows < 0) rows = n;
  check_table(mt, nvec, rows - 1);
  return type2_matrix(mt, nvec, rows).transpose();
}

// ---------------------------------------------------------------------------
// Type II
// ---------------------------------------------------------------------------

TypeIIResult type2_mop(const MomentTable& mt, const MultiIndex& nvec) {
  check_degree(nvec);
  const int n = nvec.total();
  check_table(mt, nvec, n);
  const Eigen::MatrixXd full = type2_matrix(mt, nvec, n + 1);
  const Eigen::MatrixXd s = full.leftCols(n);
  TypeIIResult res;
  res.normality = analyze_square(s);
  throw_if_singular(res.normality, nvec);
  res.ill_conditioned = res.normality.condition_estimate > kConditionWarning;

  const Eigen::VectorXd a = refined_solve(s, -full.col(n));
  std::vector<double> b(a.data(), a.data() + n);
  b.push_back(1.0);
  std::vector<double> t = to_monomial(mt.basis, std::move(b));
  // Monic in t, then monic in x: multiply by scale^n (exact for powers of two).
  const double lead = basis_leading(mt.basis, n);
  const double sn = std::pow(mt.frame.scale, n);
  for (double& v : t) v = v / lead * sn;
  t.back() = sn;
  res.polynomial = Polynomial(std::move(t), mt.frame);
  return res;
}

Polynomial type2_mop_determinantal(const MomentTable& mt, const MultiIndex& nvec) {
  check_degree(nvec);
  const int n = nvec.total();
  const HankelBlockMatrix ext = block_hankel(mt, nvec, n + 1);
  const double d = Eigen::FullPivLU<Eigen::MatrixXd>(ext.matrix.topRows(n)).determinant();
  if (d == 0.0) throw NonNormalIndexError("bordered determinant formula needs D_n != 0", d);
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    Eigen::MatrixXd minor(n, n);
    for (int r = 0, mr = 0; r <= n; ++r) {
      if (r == i) continue;
      minor.row(mr++) = ext.matrix.row(r);
    }
    const double cof = Eigen::FullPivLU<Eigen::MatrixXd>(minor).determinant();
    t[static_cast<std::size_t>(i)] = ((i + n) % 2 == 0 ? 1.0 : -1.0) * cof / d;
  }
  const double sn = std::pow(mt.frame.scale, n);
  for (double& v : t) v *= sn;
  return Polynomial(std::move(t), mt.frame);
}

// ---------------------------------------------------------------------------
// Type I
// ---------------------------------------------------------------------------

double TypeISystem::linear_form(const WeightSystem& ws, double x) const {
  double q = 0.0;
  for (std::size_t j = 0; j < A.size(); ++j) {
    if (A[j].is_zero()) continue;
    const double w = ws.weight(j)(x);
    if (w != 0.0) q += A[j](x) * w;
  }
  return q;
}

TypeISystem type1_mop(const MomentTable& mt, const MultiIndex& nvec) {
  check_degree(nvec);
  const int n = nvec.total();
  check_table(mt, nvec, n - 1);
  const Eigen::MatrixXd s = type2_matrix(mt, nvec, n).transpose();
  TypeISystem sys;
  sys.nvec = nvec;
  sys.normality = analyze_square(s);
  throw_if_singular(sys.normality, nvec);
  sys.ill_conditioned = sys.normality.condition_estimate > kConditionWarning;

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = basis_leading(mt.basis, n - 1) / std::pow(mt.frame.scale, n - 1);
  const Eigen::VectorXd b = refined_solve(s, rhs);
  int col = 0;
  for (std::size_t j = 0; j < nvec.p(); ++j) {
    std::vector<double> bj(b.data() + col, b.data() + col + nvec[j]);
    col += nvec[j];
    sys.A.emplace_back(to_monomial(mt.basis, std::move(bj)), mt.frame);
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

namespace {

// Parlett-Reinsch diagonal balancing (radix 2) in place.
void balance(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

std::pair<double, double> horner_with_derivative(const std::vector<double>& a, double t) {
  double p = 0.0, dp = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * t + p;
    p = p * t + *it;
  }
  return {p, dp};
}

double horner_bound(const std::vector<double>& a, double t) {
  double s = 0.0;
  const double at = std::abs(t);
  for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * at + std::abs(*it);
  return s;
}

}  // namespace

std::vector<double> poly_roots(const Polynomial& p, double dedupe_tol) {
  const int n = p.degree();
  if (n < 1) throw ArgumentError("poly_roots needs degree >= 1");
  const std::vector<double>& a = p.local_coefficients();
  std::vector<double> t_roots;
  if (n == 1) {
    t_roots.push_back(-a[0] / a[1]);
  } else {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) c(i, n - 1) = -a[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(n)];
    balance(c);
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    if (es.info() != Eigen::Success) throw RefinementError("companion eigenvalue iteration failed");
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::complex<double> z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z))) t_roots.push_back(z.real());
    }
  }
  std::vector<double> out;
  for (double t : t_roots) {
    // Newton polish; keep the iterate only while the residual decreases.
    auto [v, dv] = horner_with_derivative(a, t);
    for (int it = 0; it < 8 && dv != 0.0; ++it) {
      const double cand = t - v / dv;
      auto [cv, cdv] = horner_with_derivative(a, cand);
      if (!(std::abs(cv) < std::abs(v))) break;
      t = cand;
      v = cv;
      dv = cdv;
    }
    if (std::abs(v) > 1e-9 * horner_bound(a, t)) {
      std::ostringstream os;
      os << "root refinement failed at t = " << t << " (|P| = " << std::abs(v) << ")";
      throw RefinementError(os.str(), std::abs(v));
    }
    out.push_back(p.frame().to_global(t));
  }
  std::sort(out.begin(), out.end());
  if (dedupe_tol > 0.0 && !out.empty()) {
    std::vector<double> merged{out.front()};
    std::vector<int> count{1};
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (out[i] - merged.back() / count.back() <= dedupe_tol) {
        merged.back() += out[i];
        ++count.back();
      } else {
        merged.push_back(out[i]);
        count.push_back(1);
      }
    }
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i] /= count[i];
    out = std::move(merged);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

namespace {

QuadratureRule rule_for(const Weight& w, const ResidualOptions& opt) {
  return composite_rule(w.support(), opt.panels, opt.points, w.singularity());
}

}  // namespace

std::vector<std::vector<double>> orthogonality_residuals(const Polynomial& p, const WeightSystem& ws,
                                                         const MultiIndex& nvec, const ResidualOptions& opt) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
  const AffineFrame frame = canonical_frame(ws);
  std::vector<std::vector<double>> r(ws.p());
  for (std::size_t j = 0; j < ws.p(); ++j) {
    r[j].assign(static_cast<std::size_t>(nvec[j]), 0.0);
    if (nvec[j] == 0) continue;
    const QuadratureRule rule = rule_for(ws.weight(j), opt);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x = rule.nodes[q];
      const double base = rule.weights[q] * p(x) * ws.weight(j)(x);
      const double t = frame.to_local(x);
      double tk = 1.0;
      for (int k = 0; k < nvec[j]; ++k, tk *= t) r[j][static_cast<std::size_t>(k)] += base * tk;
    }
  }
  return r;
}

std::vector<double> type1_residuals(const TypeISystem& sys, const WeightSystem& ws, const ResidualOptions& opt) {
  const int n = sys.nvec.total();
  const AffineFrame frame = canonical_frame(ws);
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  for (const Interval& piece : ws.integration_pieces()) {
    const EndpointSingularity sing = piece_singularity(ws, piece);
    const QuadratureRule rule = composite_rule(piece, opt.panels, opt.points, sing);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x = rule.nodes[q];
      const double base = rule.weights[q] * sys.linear_form(ws, x);
      const double t = frame.to_local(x);
      double tk = 1.0;
      for (int k = 0; k < n; ++k, tk *= t) r[static_cast<std::size_t>(k)] += base * tk;
    }
  }
  const double sn1 = std::pow(frame.scale, n - 1);
  for (double& v : r) v *= sn1;
  r.back() -= 1.0;
  return r;
}

std::complex<double> linear_form_cauchy_transform(const TypeISystem& sys, const WeightSystem& ws,
                                                  std::complex<double> z, const ResidualOptions& opt) {
  std::complex<double> s = 0.0;
  for (const Interval& piece : ws.integration_pieces()) {
    const EndpointSingularity sing = piece_singularity(ws, piece);
    const QuadratureRule rule = composite_rule(piece, opt.panels, opt.points, sing);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x = rule.nodes[q];
      s += rule.weights[q] * sys.linear_form(ws, x) / (z - x);
    }
  }
  return s;
}

}  // namespace mopkit
