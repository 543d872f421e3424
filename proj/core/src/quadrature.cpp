#include "mopkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mopkit {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

// A piece of the integration range in the substitution variable u, together
// with the map u -> x. Plain pieces use x = u.
struct Piece {
  enum class Map { identity, sqrt_left, sqrt_right };
  Map map = Map::identity;
  double anchor = 0.0;  // singular endpoint for the sqrt maps
  double span = 0.0;    // signed distance from anchor to the far end
  double u0 = 0.0;
  double u1 = 0.0;
  double power = 2.0;

  // Returns x and dx/du.
  std::pair<double, double> at(double u) const {
    switch (map) {
      case Map::identity:
        return {u, 1.0};
      case Map::sqrt_left:
      case Map::sqrt_right: {
        const double up = power == 2.0 ? u : std::pow(u, power - 1.0);
        return {anchor + span * up * u, power * span * up};
      }
    }
    return {u, 1.0};
  }

  Abscissa locate(double u, const Interval& iv) const {
    const double x = at(u).first;
    Abscissa p{x, x - iv.a(), iv.b() - x};
    if (map == Map::sqrt_left) p.from_left = span * std::pow(u, power);
    if (map == Map::sqrt_right) p.to_right = -span * std::pow(u, power);
    return p;
  }
};

double substitution_power(double exponent) { return std::clamp(1.0 / (1.0 + exponent), 2.0, 6.0); }

std::vector<Piece> initial_pieces(const Interval& iv, EndpointSingularity sing) {
  const double a = iv.a(), b = iv.b(), m = iv.midpoint();
  if (!sing.left && !sing.right) return {Piece{Piece::Map::identity, 0, 0, a, b}};
  std::vector<Piece> out;
  if (sing.left)
    out.push_back(Piece{Piece::Map::sqrt_left, a, m - a, 0.0, 1.0, substitution_power(sing.left_exponent)});
  else
    out.push_back(Piece{Piece::Map::identity, 0, 0, a, m});
  // The right half runs u from 1 down to 0; store it reversed so u0 < u1 and
  // flip the sign of the Jacobian through `span` (b - m > 0, x = b - span u^2).
  if (sing.right)
    out.push_back(Piece{Piece::Map::sqrt_right, b, -(b - m), 0.0, 1.0, substitution_power(sing.right_exponent)});
  else
    out.push_back(Piece{Piece::Map::identity, 0, 0, m, b});
  return out;
}

struct Segment {
  Piece piece;
  std::vector<double> kronrod;
  double error = 0.0;

  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace

QuadratureRule gauss_legendre(int m) {
  if (m < 1) throw ArgumentError("gauss_legendre requires at least one node");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on the three-term recurrence.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

QuadratureRule composite_rule(const Interval& iv, int panels, int points, EndpointSingularity sing) {
  if (panels < 1) throw ArgumentError("composite_rule requires at least one panel");
  const QuadratureRule base = gauss_legendre(points);
  QuadratureRule out;
  out.nodes.reserve(static_cast<std::size_t>(panels) * points * 2);
  out.weights.reserve(out.nodes.capacity());
  for (const Piece& piece : initial_pieces(iv, sing)) {
    const double w = (piece.u1 - piece.u0) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = piece.u0 + p * w;
      for (std::size_t i = 0; i < base.size(); ++i) {
        const double u = lo + 0.5 * w * (base.nodes[i] + 1.0);
        auto [x, jac] = piece.at(u);
        out.nodes.push_back(x);
        out.weights.push_back(0.5 * w * base.weights[i] * std::abs(jac));
      }
    }
  }
  return out;
}

AdaptiveResult integrate_adaptive(const VectorIntegrand& f, std::size_t dim, const Interval& iv,
                                  EndpointSingularity sing, const AdaptiveOptions& opt) {
  return integrate_adaptive([&](const Abscissa& p, std::span<double> out) { f(p.x, out); }, dim, iv, sing, opt);
}

AdaptiveResult integrate_adaptive(const LocatedIntegrand& f, std::size_t dim, const Interval& iv,
                                  EndpointSingularity sing, const AdaptiveOptions& opt) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  AdaptiveResult result;
  std::vector<double> buf(dim);

  auto evaluate = [&](const Piece& piece) {
    Segment seg{piece, std::vector<double>(dim, 0.0), 0.0};
    std::vector<double> gauss(dim, 0.0);
    const double half = 0.5 * (piece.u1 - piece.u0);
    const double mid = 0.5 * (piece.u1 + piece.u0);
    // 15 nodes: index 0 is the centre; even indices are shared with Gauss-7.
    for (std::size_t i = 0; i < xk.size(); ++i) {
      for (int s : {1, -1}) {
        if (i == 0 && s == -1) continue;
        const double u = mid + s * half * xk[i];
        const double jac = piece.at(u).second;
        std::fill(buf.begin(), buf.end(), 0.0);
        f(piece.locate(u, iv), buf);
        ++result.evaluations;
        const double scale = half * std::abs(jac);
        for (std::size_t d = 0; d < dim; ++d) {
          const double v = buf[d] * scale;
          seg.kronrod[d] += wk[i] * v;
          if (i % 2 == 0) gauss[d] += wg[i / 2] * v;
        }
      }
    }
    for (std::size_t d = 0; d < dim; ++d)
      seg.error = std::max(seg.error, std::abs(seg.kronrod[d] - gauss[d]));
    return seg;
  };

  std::priority_queue<Segment> queue;
  for (const Piece& p : initial_pieces(iv, sing)) queue.push(evaluate(p));

  auto total_error = [&]() {
    // priority_queue hides its container; keep a running recomputation cheap
    // by copying only the error field.
    double e = 0.0;
    auto copy = queue;
    while (!copy.empty()) {
      e += copy.top().error;
      copy.pop();
    }
    return e;
  };

  double err = total_error();
  int segments = static_cast<int>(queue.size());
  while (err > opt.abs_tol && segments < opt.max_segments) {
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.piece.u0 + worst.piece.u1);
    Piece left = worst.piece, right = worst.piece;
    left.u1 = mid;
    right.u0 = mid;
    Segment sl = evaluate(left), sr = evaluate(right);
    err += sl.error + sr.error - worst.error;
    queue.push(std::move(sl));
    queue.push(std::move(sr));
    ++segments;
    // Guard against drift in the running sum.
    if (segments % 64 == 0) err = total_error();
  }

  result.values.assign(dim, 0.0);
  double final_error = 0.0;
  while (!queue.empty()) {
    const Segment& s = queue.top();
    for (std::size_t d = 0; d < dim; ++d) result.values[d] += s.kronrod[d];
    final_error += s.error;
    queue.pop();
  }
  result.error = final_error;
  result.converged = final_error <= opt.abs_tol;
  return result;
}

double integrate(const std::function<double(double)>& f, const Interval& iv, EndpointSingularity sing,
                 const AdaptiveOptions& opt) {
  auto r = integrate_adaptive([&](double x, std::span<double> out) { out[0] = f(x); }, 1, iv, sing, opt);
  if (!r.converged)
    throw NumericError("adaptive quadrature did not reach tolerance within the segment budget",
                       r.error);
  return r.values[0];
}

}  // namespace mopkit
