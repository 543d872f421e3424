#include "mopkit/extended.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include <Eigen/Eigenvalues>

#include <boost/math/constants/constants.hpp>

#include "mopkit/error.hpp"
#include "quad_detail.hpp"

namespace mopkit {

namespace {

using std::abs;
using boost::multiprecision::abs;

constexpr int kPoints = 40;
constexpr int kMaxPanels = 256;
constexpr int kInnerPanels = 2;

quad substitution_power(double exponent) { return std::clamp(1.0 / (1.0 + exponent), 2.0, 6.0); }

quad eval_family(const WeightSpec& s, const QuadAbscissa& p) {
  if (p.from_left < 0 || p.to_right < 0) return 0;
  return quad(s.factor) * std::visit(
                              [&](const auto& f) -> quad {
                                using F = std::decay_t<decltype(f)>;
                                if constexpr (std::is_same_v<F, ConstantFamily>) {
                                  return 1;
                                } else if constexpr (std::is_same_v<F, JacobiFamily>) {
                                  quad v = 1;
                                  if (f.alpha != 0.0) v *= pow(p.to_right, quad(f.alpha));
                                  if (f.beta != 0.0) v *= pow(p.from_left, quad(f.beta));
                                  return v;
                                } else {
                                  quad e = 0;
                                  for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) e = e * p.x + *it;
                                  return exp(-e);
                                }
                              },
                              s.family);
}

}  // namespace

namespace detail {

using std::abs;
using boost::multiprecision::abs;

// Composite Gauss-Legendre rule on iv. Halves adjacent to flagged endpoints
// use x = anchor +- (m - anchor) u^q, as in the double precision integrator.
QuadRule composite(const Interval& iv, EndpointSingularity sing, int panels, int points) {
  thread_local std::map<int, std::pair<std::vector<quad>, std::vector<quad>>> cache;
  auto it = cache.find(points);
  if (it == cache.end()) {
    std::pair<std::vector<quad>, std::vector<quad>> rule;
    gauss_legendre_quad(points, rule.first, rule.second);
    it = cache.emplace(points, std::move(rule)).first;
  }
  const auto& [gx, gw] = it->second;
  const quad a = iv.a(), b = iv.b();
  const quad half = (b - a) / 2;
  QuadRule r;
  auto add_half = [&](bool left_half, bool singular, double exponent) {
    const quad q = substitution_power(exponent);
    for (int p = 0; p < panels; ++p) {
      const quad u0 = quad(p) / panels, u1 = quad(p + 1) / panels;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const quad u = u0 + (u1 - u0) * (gx[i] + 1) / 2;
        const quad du = (u1 - u0) / 2 * gw[i];
        quad d, jac;  // distance from the outer endpoint of this half
        if (singular) {
          d = half * pow(u, q);
          jac = q * half * pow(u, q - 1);
        } else {
          d = half * u;
          jac = half;
        }
        QuadAbscissa n;
        if (left_half) {
          n.x = a + d;
          n.from_left = d;
          n.to_right = b - n.x;
        } else {
          n.x = b - d;
          n.to_right = d;
          n.from_left = n.x - a;
        }
        r.nodes.push_back(n);
        r.weights.push_back(du * jac);
      }
    }
  };
  add_half(true, sing.left, sing.left_exponent);
  add_half(false, sing.right, sing.right_exponent);
  return r;
}

QuadAbscissa relative_to(const Interval& iv, quad x) { return {x, x - iv.a(), iv.b() - x}; }

void legendre_values(quad t, std::vector<quad>& out) {
  const std::size_t m = out.size();
  if (m == 0) return;
  out[0] = 1;
  if (m > 1) out[1] = t;
  for (std::size_t k = 2; k < m; ++k) out[k] = ((2 * quad(k) - 1) * t * out[k - 1] - (quad(k) - 1) * out[k - 2]) / quad(k);
}

quad legendre_leading(int k) {
  quad c = 1;
  for (int i = 1; i <= k; ++i) c *= quad(2 * i - 1) / i;
  return c;
}

quad to_local(const AffineFrame& f, quad x) { return (x - f.center) / f.scale; }

QuadMatrix gram_at(const WeightSystem& ws, const MultiIndex& nvec, const AffineFrame& frame, int panels, int rows) {
  const int n = nvec.total();
  QuadMatrix g(static_cast<std::size_t>(rows), std::vector<quad>(static_cast<std::size_t>(n), 0));
  std::vector<quad> pi(static_cast<std::size_t>(std::max(n, rows)));
  for (std::size_t j = 0; j < nvec.p(); ++j) {
    if (nvec[j] == 0) continue;
    const Weight& w = ws.weight(j);
    const QuadRule r = composite(w.support(), w.singularity(), panels, kPoints);
    const int col0 = nvec.prefix(j);
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const quad wx = r.weights[q] * weight_value_quad(w, r.nodes[q]);
      legendre_values(to_local(frame, r.nodes[q].x), pi);
      for (int k = 0; k < rows; ++k) {
        const quad a = wx * pi[static_cast<std::size_t>(k)];
        for (int i = 0; i < nvec[j]; ++i) g[static_cast<std::size_t>(k)][static_cast<std::size_t>(col0 + i)] += a * pi[static_cast<std::size_t>(i)];
      }
    }
  }
  return g;
}

Lu factor(QuadMatrix a) {
  const std::size_t n = a.size();
  Lu lu{std::move(a), std::vector<std::size_t>(n), false, 1};
  for (std::size_t i = 0; i < n; ++i) lu.perm[i] = i;
  auto& m = lu.a;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) {
      lu.zero_pivot = true;
      return lu;
    }
    if (piv != c) lu.sign = -lu.sign;
    std::swap(m[piv], m[c]);
    std::swap(lu.perm[piv], lu.perm[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      m[r][c] /= m[c][c];
      for (std::size_t k = c + 1; k < n; ++k) m[r][k] -= m[r][c] * m[c][k];
    }
  }
  return lu;
}

std::vector<quad> lu_solve(const Lu& lu, const std::vector<quad>& b) {
  const std::size_t n = b.size();
  std::vector<quad> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = b[lu.perm[i]];
    for (std::size_t k = 0; k < i; ++k) y[i] -= lu.a[i][k] * y[k];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= lu.a[i][k] * y[k];
    y[i] /= lu.a[i][i];
  }
  return y;
}

quad condition(const QuadMatrix& a, const Lu& lu) {
  const std::size_t n = a.size();
  quad norm_a = 0, norm_inv = 0;
  for (std::size_t c = 0; c < n; ++c) {
    quad s = 0;
    for (std::size_t r = 0; r < n; ++r) s += abs(a[r][c]);
    norm_a = std::max(norm_a, s);
    std::vector<quad> e(n, 0);
    e[c] = 1;
    quad t = 0;
    for (const quad& v : lu_solve(lu, e)) t += abs(v);
    norm_inv = std::max(norm_inv, t);
  }
  return norm_a * norm_inv;
}

quad determinant(const Lu& lu) {
  if (lu.zero_pivot) return 0;
  quad d = lu.sign;
  for (std::size_t i = 0; i < lu.a.size(); ++i) d *= lu.a[i][i];
  return d;
}

QuadMatrix settled_gram(const WeightSystem& ws, const MultiIndex& nvec, const AffineFrame& frame, double& err,
                        int rows) {
  if (rows < 0) rows = nvec.total();
  int panels = 1;
  QuadMatrix g = gram_at(ws, nvec, frame, panels, rows);
  for (;;) {
    panels *= 2;
    QuadMatrix g2 = gram_at(ws, nvec, frame, panels, rows);
    quad scale = 1, diff = 0;
    for (std::size_t r = 0; r < g.size(); ++r)
      for (std::size_t c = 0; c < g[r].size(); ++c) {
        diff = std::max(diff, abs(g2[r][c] - g[r][c]));
        scale = std::max(scale, abs(g2[r][c]));
      }
    g = std::move(g2);
    err = static_cast<double>(diff);
    if (diff <= quad(1e-30) * scale) return g;
    if (panels >= kMaxPanels) {
      if (diff <= quad(1e-16) * scale) return g;
      throw NumericError("quadruple precision Gram matrix did not settle", err);
    }
  }
}

}  // namespace detail

using namespace detail;

void gauss_legendre_quad(int m, std::vector<quad>& nodes, std::vector<quad>& weights) {
  if (m < 1) throw ArgumentError("gauss_legendre_quad requires at least one node");
  nodes.assign(static_cast<std::size_t>(m), 0);
  weights.assign(static_cast<std::size_t>(m), 0);
  const quad pi = boost::math::constants::pi<quad>();
  for (int i = 0; i < (m + 1) / 2; ++i) {
    quad x = cos(pi * (i + quad(0.75)) / (m + quad(0.5)));
    quad dp = 0;
    for (int it = 0; it < 100; ++it) {
      quad p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const quad pk = ((2 * quad(k) - 1) * x * p1 - (quad(k) - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const quad dx = p1 / dp;
      x -= dx;
      if (abs(dx) < quad(1e-33)) break;
    }
    const quad w = 2 / ((1 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  if (m % 2 == 1) nodes[static_cast<std::size_t>(m / 2)] = 0;
}

quad weight_value_quad(const Weight& w, const QuadAbscissa& p) {
  const quad base = eval_family(w.base_spec(), p);
  if (base == 0 || !w.is_lifted()) return base;
  const Weight& v = w.generator();
  struct Cached {
    Interval support;
    EndpointSingularity sing;
    QuadRule rule;
  };
  thread_local std::vector<Cached> rules;
  auto it = std::find_if(rules.begin(), rules.end(), [&](const Cached& c) {
    return c.support.a() == v.support().a() && c.support.b() == v.support().b() && c.sing == v.singularity();
  });
  if (it == rules.end()) {
    rules.push_back({v.support(), v.singularity(), composite(v.support(), v.singularity(), kInnerPanels, kPoints)});
    it = rules.end() - 1;
  }
  const QuadRule& r = it->rule;
  quad s = 0;
  for (std::size_t q = 0; q < r.nodes.size(); ++q)
    s += r.weights[q] * weight_value_quad(v, r.nodes[q]) / (p.x - r.nodes[q].x);
  return base * static_cast<int>(w.lift_sign()) * s;
}

quad weight_value_quad(const Weight& w, quad x) { return weight_value_quad(w, relative_to(w.support(), x)); }

QuadTypeI QuadTypeI::solve(const WeightSystem& ws, const MultiIndex& nvec) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index length must equal the number of weights");
  const int n = nvec.total();
  if (n < 1 || n > kMaxDegree) throw ArgumentError("type I degree must lie in 1 .. kMaxDegree");

  QuadTypeI out;
  out.nvec_ = nvec;
  out.frame_ = canonical_frame(ws);

  const QuadMatrix g = settled_gram(ws, nvec, out.frame_, out.gram_error_);

  const Lu lu = factor(g);
  const quad cond = lu.zero_pivot ? quad(0) : condition(g, lu);
  out.condition_ = lu.zero_pivot ? std::numeric_limits<double>::infinity() : static_cast<double>(cond);
  if (lu.zero_pivot || cond > quad(1e30)) {
    std::ostringstream os;
    os << "multi-index (";
    for (std::size_t j = 0; j < nvec.p(); ++j) os << (j ? "," : "") << nvec[j];
    os << ") is not normal in quadruple precision, condition estimate " << out.condition_;
    throw NonNormalIndexError(os.str(), 0.0);
  }

  std::vector<quad> rhs(static_cast<std::size_t>(n), 0);
  rhs.back() = legendre_leading(n - 1) / pow(quad(out.frame_.scale), n - 1);
  std::vector<quad> a = lu_solve(lu, rhs);
  // One refinement step; the residual is already at working precision.
  std::vector<quad> res(rhs);
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c) res[r] -= g[r][c] * a[c];
  const std::vector<quad> da = lu_solve(lu, res);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += da[i];

  for (std::size_t j = 0; j < nvec.p(); ++j) {
    const auto b = a.begin() + nvec.prefix(j);
    out.coeffs_.emplace_back(b, b + nvec[j]);
  }
  return out;
}

quad QuadTypeI::polynomial(std::size_t j, quad x) const {
  const auto& c = coeffs_.at(j);
  std::vector<quad> pi(c.size());
  legendre_values(to_local(frame_, x), pi);
  quad s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * pi[i];
  return s;
}

quad QuadTypeI::linear_form(const WeightSystem& ws, quad x) const {
  quad s = 0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    if (coeffs_[j].empty()) continue;
    const quad wx = weight_value_quad(ws.weight(j), x);
    if (wx != 0) s += polynomial(j, x) * wx;
  }
  return s;
}

namespace {

std::vector<double> legendre_to_local(const std::vector<quad>& c) {
  const std::size_t m = c.size();
  std::vector<quad> mono(m, 0), prev(m, 0), cur(m, 0);
  if (m > 0) cur[0] = 1;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < m; ++i) mono[i] += c[k] * cur[i];
    // P_{k+1} = ((2k + 1) t P_k - k P_{k-1}) / (k + 1)
    std::vector<quad> next(m, 0);
    const quad kk = quad(k);
    for (std::size_t i = 0; i + 1 < m; ++i) next[i + 1] = (2 * kk + 1) * cur[i] / (kk + 1);
    for (std::size_t i = 0; i < m; ++i) next[i] -= kk * prev[i] / (kk + 1);
    prev = std::move(cur);
    cur = std::move(next);
  }
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) d[i] = static_cast<double>(mono[i]);
  return d;
}

// p(t) = sum c_k P_k(t) and p'(t).
std::pair<quad, quad> legendre_series(const std::vector<quad>& c, quad t) {
  quad p0 = 1, p1 = t, d0 = 0, d1 = 1;
  quad v = c[0], dv = 0;
  if (c.size() > 1) {
    v += c[1] * t;
    dv += c[1];
  }
  for (std::size_t k = 1; k + 1 < c.size(); ++k) {
    const quad kk = quad(k);
    const quad p2 = ((2 * kk + 1) * t * p1 - kk * p0) / (kk + 1);
    const quad d2 = d0 + (2 * kk + 1) * p1;
    v += c[k + 1] * p2;
    dv += c[k + 1] * d2;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {v, dv};
}

}  // namespace

TypeISystem QuadTypeI::rounded() const {
  TypeISystem sys;
  sys.nvec = nvec_;
  sys.normality.condition_estimate = condition_;
  sys.ill_conditioned = condition_ > kConditionWarning;
  for (const auto& c : coeffs_) sys.A.emplace_back(legendre_to_local(c), frame_);
  return sys;
}

QuadTypeII QuadTypeII::solve(const WeightSystem& ws, const MultiIndex& nvec) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index length must equal the number of weights");
  const int n = nvec.total();
  if (n < 1 || n > kMaxQuadDegree) throw ArgumentError("type II degree must lie in 1 .. kMaxQuadDegree");

  QuadTypeII out;
  out.nvec_ = nvec;
  out.frame_ = canonical_frame(ws);
  const QuadMatrix g = settled_gram(ws, nvec, out.frame_, out.gram_error_, n + 1);

  // sum_{k < n} c_k G(k, col) = -c_n G(n, col) for every column.
  const std::size_t sz = static_cast<std::size_t>(n);
  QuadMatrix a(sz, std::vector<quad>(sz));
  for (std::size_t col = 0; col < sz; ++col)
    for (std::size_t k = 0; k < sz; ++k) a[col][k] = g[k][col];
  const Lu lu = factor(a);
  const quad cond = lu.zero_pivot ? quad(0) : condition(a, lu);
  out.condition_ = lu.zero_pivot ? std::numeric_limits<double>::infinity() : static_cast<double>(cond);
  if (lu.zero_pivot || cond > quad(1e30)) {
    std::ostringstream os;
    os << "multi-index (";
    for (std::size_t j = 0; j < nvec.p(); ++j) os << (j ? "," : "") << nvec[j];
    os << ") is not normal in quadruple precision, condition estimate " << out.condition_;
    throw NonNormalIndexError(os.str(), 0.0);
  }
  const quad cn = pow(quad(out.frame_.scale), n) / legendre_leading(n);
  std::vector<quad> rhs(sz);
  for (std::size_t col = 0; col < sz; ++col) rhs[col] = -cn * g[sz][col];
  std::vector<quad> c = lu_solve(lu, rhs);
  std::vector<quad> res(rhs);
  for (std::size_t r = 0; r < sz; ++r)
    for (std::size_t k = 0; k < sz; ++k) res[r] -= a[r][k] * c[k];
  const std::vector<quad> dc = lu_solve(lu, res);
  for (std::size_t i = 0; i < sz; ++i) c[i] += dc[i];
  c.push_back(cn);
  out.coeffs_ = std::move(c);
  return out;
}

quad QuadTypeII::operator()(quad x) const { return legendre_series(coeffs_, to_local(frame_, x)).first; }

Polynomial QuadTypeII::rounded() const { return Polynomial(legendre_to_local(coeffs_), frame_); }

std::vector<double> QuadTypeII::real_roots() const {
  const int n = degree();
  // t v = M v on v = (P_0(t), ..., P_{n-1}(t)) at zeros of p.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double a = (k + 1.0) / (2.0 * k + 1.0), b = k / (2.0 * k + 1.0);
    if (k > 0) m(k, k - 1) = b;
    if (k + 1 < n) {
      m(k, k + 1) = a;
    } else {
      for (int j = 0; j < n; ++j)
        m(k, j) -= a * static_cast<double>(coeffs_[static_cast<std::size_t>(j)] / coeffs_.back());
    }
  }
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
  std::vector<quad> ts;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i).imag()) > 1e-6 * std::max(1.0, std::abs(ev(i)))) continue;
    quad t = ev(i).real();
    // Stop at working precision or once the steps stall at the rounding level
    // of the series evaluation.
    quad prev = std::numeric_limits<quad>::infinity(), step = prev;
    for (int it = 0; it < 60; ++it) {
      const auto [v, dv] = legendre_series(coeffs_, t);
      if (dv == 0) break;
      step = abs(v / dv);
      t -= v / dv;
      if (step <= quad(1e-32) * std::max(quad(1), abs(t))) break;
      if (step <= quad(1e-18) && step > prev / 2) break;
      prev = step;
    }
    if (!(step <= quad(1e-18)))
      throw RefinementError("Newton polishing of a type II zero did not converge", static_cast<double>(step));
    ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (ts[i] - ts[i - 1] <= quad(1e-25))
      throw RefinementError("two polished type II zeros merged", static_cast<double>(ts[i]));
  std::vector<double> out;
  for (const quad& t : ts) out.push_back(static_cast<double>(frame_.center + frame_.scale * t));
  return out;
}

std::vector<double> type1_residuals(const QuadTypeI& sys, const WeightSystem& ws, int panels, int points) {
  const int n = sys.nvec().total();
  std::vector<quad> r(static_cast<std::size_t>(n), 0);
  for (const Interval& piece : ws.integration_pieces()) {
    const QuadRule rule = composite(piece, piece_singularity(ws, piece), panels, points);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const QuadAbscissa& node = rule.nodes[q];
      quad qx = 0;
      for (std::size_t j = 0; j < ws.p(); ++j) {
        if (sys.nvec()[j] == 0) continue;
        const Weight& w = ws.weight(j);
        const Interval& sup = w.support();
        if (!sup.contains(static_cast<double>(node.x))) continue;
        QuadAbscissa local = relative_to(sup, node.x);
        if (sup.a() == piece.a()) local.from_left = node.from_left;
        if (sup.b() == piece.b()) local.to_right = node.to_right;
        qx += sys.polynomial(j, node.x) * weight_value_quad(w, local);
      }
      const quad base = rule.weights[q] * qx;
      quad xk = 1;
      for (int k = 0; k < n; ++k, xk *= node.x) r[static_cast<std::size_t>(k)] += base * xk;
    }
  }
  r.back() -= 1;
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = static_cast<double>(r[i]);
  return out;
}

}  // namespace mopkit
