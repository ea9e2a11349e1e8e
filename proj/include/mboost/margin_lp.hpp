#pragma once

// Exact game value of M by linear programming, plus a grid oracle for tiny n.

#include <cstddef>
#include <vector>

#include "mboost/margin_core.hpp"

namespace mboost {

struct LPSolution {
  double rho = 0.0;
  std::vector<double> lambda_star;  // over columns
  std::vector<double> d_star;       // over rows
  // max_j (d*^T M)_j - min_i (M lambda*)_i
  double gap = 0.0;
  std::size_t pivots = 0;
  bool certified() const { return gap <= 1e-9; }
};

/// Solves max_lambda min_i (M lambda)_i and its dual with a dense simplex
/// (Bland's rule). rho is the midpoint of the certified primal and dual
/// values; if the gap exceeds 1e-9 a permuted tableau is tried and the
/// better result is returned with its gap.
LPSolution max_margin(const GameMatrix& M);

/// Best min-margin over the barycentric grid of the simplex with `grid`
/// subdivisions. Needs n <= 4 and grid >= 10.
double brute_force_value(const GameMatrix& M, int grid);

}  // namespace mboost
