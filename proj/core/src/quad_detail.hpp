#pragma once

#include <cstddef>
#include <vector>

#include "mopkit/extended.hpp"

namespace mopkit::detail {

using QuadMatrix = std::vector<std::vector<quad>>;

struct QuadRule {
  std::vector<QuadAbscissa> nodes;
  std::vector<quad> weights;
};

QuadRule composite(const Interval& iv, EndpointSingularity sing, int panels, int points);
QuadAbscissa relative_to(const Interval& iv, quad x);

// Legendre P_0 .. P_{m-1} at t, m = out.size().
void legendre_values(quad t, std::vector<quad>& out);
quad legendre_leading(int k);
quad to_local(const AffineFrame& f, quad x);

// G(k, N_j + i) = int pi_k pi_i w_j for k < rows (default |n|), refined by
// panel doubling until settled. err receives the last refinement difference.
QuadMatrix settled_gram(const WeightSystem& ws, const MultiIndex& nvec, const AffineFrame& frame, double& err,
                        int rows = -1);

struct Lu {
  QuadMatrix a;
  std::vector<std::size_t> perm;
  bool zero_pivot = false;
  int sign = 1;
};

Lu factor(QuadMatrix a);
std::vector<quad> lu_solve(const Lu& lu, const std::vector<quad>& b);
quad determinant(const Lu& lu);
// 1-norm condition number from the explicit inverse.
quad condition(const QuadMatrix& a, const Lu& lu);

}  // namespace mopkit::detail
