#include <cmath>

#include "mopkit/ensemble.hpp"
#include "mopkit/extended.hpp"
#include "quad_detail.hpp"

namespace mopkit {

using namespace detail;
using boost::multiprecision::abs;

struct Kernel::Data {
  QuadMatrix m, a, b;
};

namespace {

std::vector<quad> pi_at(const AffineFrame& frame, int n, double x) {
  std::vector<quad> pi(static_cast<std::size_t>(n));
  legendre_values(to_local(frame, quad(x)), pi);
  return pi;
}

std::vector<quad> gamma_at(const WeightSystem& ws, const MultiIndex& nvec, const AffineFrame& frame, double y) {
  std::vector<quad> g(static_cast<std::size_t>(nvec.total()), 0);
  const quad t = to_local(frame, quad(y));
  std::size_t col = 0;
  for (std::size_t j = 0; j < nvec.p(); ++j) {
    if (nvec[j] == 0) continue;
    const quad w = weight_value_quad(ws.weight(j), quad(y));
    std::vector<quad> pi(static_cast<std::size_t>(nvec[j]));
    if (w != 0) {
      legendre_values(t, pi);
      for (const quad& v : pi) g[col++] = v * w;
    } else {
      col += pi.size();
    }
  }
  return g;
}

std::vector<quad> times(const QuadMatrix& a, const std::vector<quad>& v) {
  std::vector<quad> out(a.size(), 0);
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += a[r][c] * v[c];
  return out;
}

Eigen::VectorXd rounded(const std::vector<quad>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = static_cast<double>(v[i]);
  return out;
}

Eigen::MatrixXd rounded(const QuadMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = static_cast<double>(a[r][c]);
  return out;
}

}  // namespace

Kernel::Kernel(WeightSystem ws, MultiIndex nvec, AffineFrame frame, std::shared_ptr<const Data> d)
    : ws_(std::move(ws)), nvec_(std::move(nvec)), frame_(frame), d_(std::move(d)), a_(rounded(d_->a)), b_(rounded(d_->b)) {}

Eigen::VectorXd Kernel::phi(double x) const { return rounded(times(d_->a, pi_at(frame_, n(), x))); }

Eigen::VectorXd Kernel::psi(double y) const { return rounded(times(d_->b, gamma_at(ws_, nvec_, frame_, y))); }

double Kernel::operator()(double x, double y) const {
  const auto f = times(d_->a, pi_at(frame_, n(), x));
  const auto g = times(d_->b, gamma_at(ws_, nvec_, frame_, y));
  quad s = 0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return static_cast<double>(s);
}

double Kernel::bordered(double x, double y) const {
  const std::size_t n = d_->m.size();
  QuadMatrix b(n + 1, std::vector<quad>(n + 1, 0));
  const auto f = pi_at(frame_, n, x);
  const auto g = gamma_at(ws_, nvec_, frame_, y);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) b[r][c] = d_->m[r][c];
    b[r][n] = f[r];
    b[n][r] = g[r];
  }
  return static_cast<double>(-determinant(factor(std::move(b))) / determinant(factor(d_->m)));
}

Kernel biorthogonalize(const WeightSystem& ws, const MultiIndex& nvec) {
  if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
  const int n = nvec.total();
  if (n < 1 || n > kMaxDegree) throw ArgumentError("kernel needs 1 <= |n| <= kMaxDegree");
  const AffineFrame frame = canonical_frame(ws);
  auto d = std::make_shared<Kernel::Data>();
  double gram_err = 0.0;
  d->m = settled_gram(ws, nvec, frame, gram_err);
  const Lu lu = factor(d->m);
  if (lu.zero_pivot || condition(d->m, lu) > quad(1e30))
    throw NonNormalIndexError("Gram matrix of the kernel basis is singular", 0.0);

  // P M = L U  =>  A = L^{-1} P,  B = U^{-T}.
  const std::size_t sz = static_cast<std::size_t>(n);
  d->a.assign(sz, std::vector<quad>(sz, 0));
  d->b.assign(sz, std::vector<quad>(sz, 0));
  for (std::size_t c = 0; c < sz; ++c) {
    // Column c of L^{-1}, scattered to column perm[c] of A.
    std::vector<quad> e(sz, 0);
    e[c] = 1;
    for (std::size_t i = 0; i < sz; ++i)
      for (std::size_t k = 0; k < i; ++k) e[i] -= lu.a[i][k] * e[k];
    for (std::size_t i = 0; i < sz; ++i) d->a[i][lu.perm[c]] = e[i];
    // Column c of U^{-1} is row c of B.
    std::vector<quad> u(sz, 0);
    u[c] = 1;
    for (std::size_t i = sz; i-- > 0;) {
      for (std::size_t k = i + 1; k < sz; ++k) u[i] -= lu.a[i][k] * u[k];
      u[i] /= lu.a[i][i];
    }
    for (std::size_t i = 0; i < sz; ++i) d->b[c][i] = u[i];
  }

  quad err = 0;
  for (std::size_t r = 0; r < sz; ++r)
    for (std::size_t c = 0; c < sz; ++c) {
      quad s = 0;
      for (std::size_t i = 0; i < sz; ++i) {
        quad mb = 0;
        for (std::size_t k = 0; k < sz; ++k) mb += d->m[i][k] * d->b[c][k];
        s += d->a[r][i] * mb;
      }
      err = std::max(err, abs(s - (r == c ? 1 : 0)));
    }
  if (err > quad(1e-9)) throw NumericError("biorthogonalization lost accuracy", static_cast<double>(err));
  Kernel k(ws, nvec, frame, std::move(d));
  k.bio_err_ = static_cast<double>(err);
  k.gram_err_ = gram_err;
  return k;
}

double kernel_eval(const Kernel& k, double x, double y) { return k(x, y); }

double kernel_eval_bordered(const HankelBlockMatrix& m, const WeightSystem& ws, double x, double y) {
  const MultiIndex& nvec = m.nvec;
  const int n = nvec.total();
  if (m.matrix.rows() != n || m.matrix.cols() != n) throw ArgumentError("bordered kernel needs the square M_n");
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) = m.matrix;
  const double tx = m.frame.to_local(x);
  double p = 1.0;
  for (int r = 0; r < n; ++r, p *= tx) b(r, n) = p;
  const double ty = m.frame.to_local(y);
  int col = 0;
  for (std::size_t j = 0; j < nvec.p(); ++j) {
    const double w = nvec[j] > 0 ? ws.weight(j)(y) : 0.0;
    double q = 1.0;
    for (int i = 0; i < nvec[j]; ++i, ++col, q *= ty) b(n, col) = q * w;
  }
  const double d = m.matrix.partialPivLu().determinant();
  if (d == 0.0) throw NonNormalIndexError("bordered kernel needs D_n != 0", d);
  return -b.partialPivLu().determinant() / d;
}

double mean_density(const Kernel& k, double x) { return k(x, x) / k.n(); }

}  // namespace mopkit
