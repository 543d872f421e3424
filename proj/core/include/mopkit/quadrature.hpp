#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mopkit/interval.hpp"

namespace mopkit {

/// Integrable endpoint singularities of the integrand, behaving like
/// |x - endpoint|^exponent. A flagged endpoint is removed by the substitution
/// x = a + (m - a) u^q on the adjacent half, with q = 1 / (1 + exponent)
/// clamped to [2, 6] (q = 2 for the default exponent -1/2).
struct EndpointSingularity {
  bool left = false;
  bool right = false;
  double left_exponent = -0.5;
  double right_exponent = -0.5;

  friend bool operator==(const EndpointSingularity&, const EndpointSingularity&) = default;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// m-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int m);

/// Composite Gauss-Legendre rule on `iv`: `panels` equal panels of
/// `points` nodes each, with the square-root substitution applied on the
/// halves adjacent to flagged endpoints.
QuadratureRule composite_rule(const Interval& iv, int panels, int points,
                              EndpointSingularity sing = {});

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  int max_segments = 4000;
};

struct AdaptiveResult {
  std::vector<double> values;
  double error = 0.0;  // max over components of the summed Kronrod-Gauss gaps
  int evaluations = 0;
  bool converged = false;
};

/// Vector-valued integrand: writes f_0(x) ... f_{d-1}(x) into the span.
using VectorIntegrand = std::function<void(double, std::span<double>)>;

/// A node together with its distances to the ends of the integration
/// interval, computed without cancellation near a substituted endpoint.
struct Abscissa {
  double x = 0.0;
  double from_left = 0.0;
  double to_right = 0.0;
};

using LocatedIntegrand = std::function<void(const Abscissa&, std::span<double>)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration of every component of
/// `f` over `iv` to absolute tolerance. Does not throw on non-convergence;
/// callers inspect `converged`.
AdaptiveResult integrate_adaptive(const VectorIntegrand& f, std::size_t dim, const Interval& iv,
                                  EndpointSingularity sing, const AdaptiveOptions& opt);
AdaptiveResult integrate_adaptive(const LocatedIntegrand& f, std::size_t dim, const Interval& iv,
                                  EndpointSingularity sing, const AdaptiveOptions& opt);

/// Scalar convenience wrapper. Throws NumericError (carrying the achieved
/// error estimate) when the budget is exhausted.
double integrate(const std::function<double(double)>& f, const Interval& iv,
                 EndpointSingularity sing = {}, const AdaptiveOptions& opt = {});

}  // namespace mopkit
