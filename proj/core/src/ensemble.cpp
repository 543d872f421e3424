#include "mopkit/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mopkit/extended.hpp"
#include "quad_detail.hpp"

namespace mopkit {

namespace {

bool has_coincident(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s[i]));
    if (s[i] - s[i - 1] <= tol) return true;
  }
  return false;
}

SignedLog signed_log_det(const Eigen::MatrixXd& m) {
  SignedLog r;
  if (m.rows() == 0) {
    r.sign = 1;
    r.log_abs = 0.0;
    return r;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd& u = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  double logabs = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d == 0.0 || !std::isfinite(d)) return {};
    if (d < 0) sign = -sign;
    logabs += std::log(std::abs(d));
  }
  r.sign = sign;
  r.log_abs = logabs;
  return r;
}

double log_abs_vandermonde(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); ++k) s += std::log(std::abs(x[k] - x[j]));
  return s;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_nikishin2(const WeightSystem& ws, const MultiIndex& nvec) {
  if (ws.kind() != SystemKind::nikishin || ws.p() != 2)
    throw ArgumentError("extended density needs a Nikishin system with p = 2");
  if (nvec.p() != 2) throw ArgumentError("multi-index must have two components");
}

// Composite rule over every integration piece, flagging endpoint singularities
// of the weights that end there.
QuadratureRule union_rule(const WeightSystem& ws, int panels, int points) {
  QuadratureRule all;
  for (const Interval& piece : ws.integration_pieces()) {
    const EndpointSingularity sing = piece_singularity(ws, piece);
    QuadratureRule r = composite_rule(piece, panels, points, sing);
    all.nodes.insert(all.nodes.end(), r.nodes.begin(), r.nodes.end());
    all.weights.insert(all.weights.end(), r.weights.begin(), r.weights.end());
  }
  return all;
}

// Sign of det[g_j(x_k)] with weights, powers and elimination in quadruple
// precision, for configurations where the double LU cannot resolve it.
int quad_g_sign(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x, const AffineFrame& frame) {
  const std::size_t n = x.size();
  detail::QuadMatrix g(n, std::vector<quad>(n, 0));
  for (std::size_t k = 0; k < n; ++k) {
    const quad t = (quad(x[k]) - frame.center) / frame.scale;
    std::size_t row = 0;
    for (std::size_t j = 0; j < nvec.p(); ++j) {
      if (nvec[j] == 0) continue;
      const quad w = weight_value_quad(ws.weight(j), quad(x[k]));
      quad ti = 1;
      for (int i = 0; i < nvec[j]; ++i, ++row, ti *= t) g[row][k] = ti * w;
    }
  }
  const quad d = detail::determinant(detail::factor(std::move(g)));
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

}  // namespace

double basis_f(int k, double x) {
  if (k < 0) throw ArgumentError("basis index must be non-negative");
  return std::pow(x, k);
}

double basis_g(const WeightSystem& ws, const MultiIndex& nvec, int k, double x) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
  const auto [j, i] = nvec.locate(k);
  const double w = ws.weight(j)(x);
  return w == 0.0 ? 0.0 : std::pow(x, i) * w;
}

double vandermonde(std::span<const double> x) {
  double s = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); ++k) s *= x[k] - x[j];
  return s;
}

double delta_cross(std::span<const double> x, std::span<const double> y) {
  double s = 1.0;
  for (double xk : x)
    for (double yj : y) s *= xk - yj;
  return s;
}

Eigen::MatrixXd g_matrix(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                         const AffineFrame& frame) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
  const int n = nvec.total();
  if (static_cast<int>(x.size()) != n) throw ArgumentError("configuration size must equal |n|");
  Eigen::MatrixXd g(n, n);
  for (int k = 0; k < n; ++k) {
    const double t = frame.to_local(x[static_cast<std::size_t>(k)]);
    int row = 0;
    for (std::size_t j = 0; j < nvec.p(); ++j) {
      if (nvec[j] == 0) continue;
      const double w = ws.weight(j)(x[static_cast<std::size_t>(k)]);
      double ti = 1.0;
      for (int i = 0; i < nvec[j]; ++i, ++row, ti *= t) g(row, k) = ti * w;
    }
  }
  return g;
}

SignedLog g_determinant_log(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                            const AffineFrame& frame) {
  const Eigen::MatrixXd g = g_matrix(ws, nvec, x, frame);
  if (has_coincident(x)) return {};
  return signed_log_det(g);
}

double g_determinant(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x) {
  return g_determinant_log(ws, nvec, x).value();
}

SignReport sign_constancy_check(const WeightSystem& ws, const MultiIndex& nvec, int trials, std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("sign check needs at least one trial");
  const std::vector<Interval> pieces = ws.integration_pieces();
  std::vector<double> lengths;
  for (const auto& iv : pieces) lengths.push_back(iv.length());
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(lengths.begin(), lengths.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const AffineFrame frame = canonical_frame(ws);
  const std::size_t n = static_cast<std::size_t>(nvec.total());

  SignReport rep;
  rep.trials = trials;
  int pos = 0, neg = 0;
  std::vector<double> x(n);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : x) {
      const Interval& iv = pieces[pick(rng)];
      v = iv.a() + iv.length() * unit(rng);
    }
    std::sort(x.begin(), x.end());
    int sign = 0;
    if (!has_coincident(x)) {
      const Eigen::MatrixXd g = g_matrix(ws, nvec, x, frame);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
      sign = signed_log_det(g).sign;
      if (sign != 0 && lu.rcond() < 1e-10) sign = quad_g_sign(ws, nvec, x, frame);
    }
    if (sign > 0) ++pos;
    if (sign < 0) ++neg;
  }
  rep.nonzero = pos + neg;
  rep.sign = pos >= neg ? (pos > 0 ? 1 : 0) : -1;
  rep.violations = std::min(pos, neg);
  return rep;
}

double log_joint_density_unnormalized(const WeightSystem& ws, const MultiIndex& nvec,
                                      std::span<const double> x) {
  const SignedLog g = g_determinant_log(ws, nvec, x);
  if (g.sign == 0) return -std::numeric_limits<double>::infinity();
  return log_abs_vandermonde(x) + g.log_abs;
}

double joint_density_unnormalized(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x) {
  return std::exp(log_joint_density_unnormalized(ws, nvec, x));
}

double joint_density(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                     double determinant) {
  if (determinant == 0.0) throw NonNormalIndexError("partition function Z_n = D_n n! vanishes", determinant);
  const double lz = std::log(std::abs(determinant)) + std::log(factorial(nvec.total()));
  return std::exp(log_joint_density_unnormalized(ws, nvec, x) - lz);
}

double angelesco_density(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x) {
  if (ws.kind() != SystemKind::angelesco) throw ArgumentError("angelesco_density needs an Angelesco system");
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
  if (static_cast<int>(x.size()) != nvec.total()) throw ArgumentError("configuration size must equal |n|");
  const auto& iv = ws.intervals();
  std::vector<std::vector<double>> blocks(ws.p());
  for (double v : x) {
    std::size_t j = 0;
    while (j < iv.size() && !iv[j].contains(v)) ++j;
    if (j == iv.size()) return 0.0;
    blocks[j].push_back(v);
  }
  double logd = 0.0;
  for (std::size_t j = 0; j < ws.p(); ++j) {
    if (static_cast<int>(blocks[j].size()) != nvec[j]) return 0.0;
    for (double v : blocks[j]) {
      const double w = ws.weight(j)(v);
      if (w <= 0.0) return 0.0;
      logd += std::log(w);
    }
    if (has_coincident(blocks[j])) return 0.0;
    logd += 2.0 * log_abs_vandermonde(blocks[j]);
    for (std::size_t k = j + 1; k < ws.p(); ++k)
      for (double a : blocks[j])
        for (double b : blocks[k]) logd += std::log(std::abs(b - a));
  }
  return std::exp(logd);
}

double nikishin_extended_density(const WeightSystem& ws, const MultiIndex& nvec, std::span<const double> x,
                                 std::span<const double> y) {
  require_nikishin2(ws, nvec);
  if (static_cast<int>(x.size()) != nvec.total() || static_cast<int>(y.size()) != nvec[1])
    throw ArgumentError("extended density needs |X| = n and |Y| = n_2");
  const Weight& w1 = ws.weight(0);
  const Weight& v = ws.generators().front();
  // The two point sets must be separated in the same order as the intervals.
  const bool gen_left = v.support().b() <= w1.support().a();
  for (double xk : x)
    for (double yj : y)
      if ((xk - yj > 0.0) != gen_left) {
        std::ostringstream os;
        os << "point " << xk << " of X and " << yj << " of Y violate the interval order";
        throw DomainError(os.str());
      }
  if (has_coincident(x) || has_coincident(y)) return 0.0;
  double logd = 0.0;
  for (double xk : x) {
    const double w = w1(xk);
    if (w <= 0.0) return 0.0;
    logd += std::log(w);
  }
  for (double yj : y) {
    const double w = v(yj);
    if (w <= 0.0) return 0.0;
    logd += std::log(w);
  }
  logd += 2.0 * log_abs_vandermonde(x) + 2.0 * log_abs_vandermonde(y);
  for (double xk : x)
    for (double yj : y) logd -= std::log(std::abs(xk - yj));
  return std::exp(logd);
}

double cauchy_vandermonde_det(std::span<const double> x, std::span<const double> y, int n1) {
  const int n = static_cast<int>(x.size());
  if (n1 < 0 || n1 + static_cast<int>(y.size()) != n) throw ArgumentError("need n_1 + |Y| = |X|");
  Eigen::MatrixXd m(n, n);
  for (int k = 0; k < n; ++k) {
    const double xk = x[static_cast<std::size_t>(k)];
    double p = 1.0;
    for (int i = 0; i < n1; ++i, p *= xk) m(i, k) = p;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (xk == y[j]) throw DomainError("coincident x and y make the Cauchy rows singular");
      m(n1 + static_cast<int>(j), k) = 1.0 / (xk - y[j]);
    }
  }
  if (n == 0) return 1.0;
  return m.partialPivLu().determinant();
}

MarginalizationReport marginalization_check(const WeightSystem& ws, const MultiIndex& nvec, int points,
                                            int nodes, std::uint64_t seed) {
  require_nikishin2(ws, nvec);
  const int n = nvec.total();
  const int n2 = nvec[1];
  if (n2 > 3) throw ArgumentError("tensor quadrature over Y is limited to n_2 <= 3");
  const Weight& w1 = ws.weight(0);
  const Weight& v = ws.generators().front();
  const QuadratureRule rule = composite_rule(v.support(), 1, nodes, v.singularity());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Interval g1 = w1.support();
  MarginalizationReport rep;
  rep.points = points;
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n2));
  std::vector<std::size_t> idx(static_cast<std::size_t>(n2));
  const std::size_t m = rule.size();
  for (int trial = 0; trial < points; ++trial) {
    for (auto& xv : x) xv = g1.a() + g1.length() * (0.05 + 0.9 * unit(rng));
    std::sort(x.begin(), x.end());

    double integral = 0.0;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double weight = 1.0;
      for (int j = 0; j < n2; ++j) {
        y[static_cast<std::size_t>(j)] = rule.nodes[idx[static_cast<std::size_t>(j)]];
        weight *= rule.weights[idx[static_cast<std::size_t>(j)]];
      }
      integral += weight * nikishin_extended_density(ws, nvec, x, y);
      int d = 0;
      while (d < n2 && ++idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d++)] = 0;
      if (d == n2) break;
    }
    integral /= factorial(n2);

    const double direct = std::abs(vandermonde(x) * g_determinant(ws, nvec, x));
    const double rel = std::abs(integral - direct) / direct;
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, rel);
  }
  return rep;
}

double cauchy_binet_integral(const WeightSystem& ws, const MultiIndex& nvec, int nodes) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
  const int n = nvec.total();
  if (n < 1 || n > 4) throw ArgumentError("tensor quadrature is limited to 1 <= n <= 4");
  const QuadratureRule rule = union_rule(ws, 2, nodes);
  const std::size_t m = rule.size();
  // Column values f_r(x_q) and g_k(x_q) at every node.
  Eigen::MatrixXd fv(n, static_cast<Eigen::Index>(m)), gv(n, static_cast<Eigen::Index>(m));
  for (std::size_t q = 0; q < m; ++q) {
    const double xq = rule.nodes[q];
    double p = 1.0;
    for (int r = 0; r < n; ++r, p *= xq) fv(r, static_cast<Eigen::Index>(q)) = p;
    int row = 0;
    for (std::size_t j = 0; j < nvec.p(); ++j) {
      const double w = nvec[j] > 0 ? ws.weight(j)(xq) : 0.0;
      double xi = 1.0;
      for (int i = 0; i < nvec[j]; ++i, ++row, xi *= xq) gv(row, static_cast<Eigen::Index>(q)) = xi * w;
    }
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXd f(n, n), g(n, n);
  long double total = 0.0L;
  while (true) {
    double weight = 1.0;
    for (int k = 0; k < n; ++k) {
      const auto q = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(k)]);
      f.col(k) = fv.col(q);
      g.col(k) = gv.col(q);
      weight *= rule.weights[static_cast<std::size_t>(q)];
    }
    total += static_cast<long double>(weight * f.determinant() * g.determinant());
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == n) break;
  }
  return static_cast<double>(total) / factorial(n);
}

}  // namespace mopkit
