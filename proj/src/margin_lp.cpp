#include "mboost/margin_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mboost {

namespace {

constexpr double kPivotEps = 1e-12;
// Smallest pivot element the ratio test accepts.
constexpr double kRatioEps = 1e-9;

// Entries of M shifted by +2 so that every entry is positive and the game
// value is positive; the shift moves the value by exactly 2.
constexpr double kShift = 2.0;

struct Raw {
  std::vector<double> y;  // over rows of M
  std::vector<double> x;  // over columns of M
  std::size_t pivots = 0;
};

// Rebuilds the tableau for the current basis from the original data, which
// wipes out the roundoff accumulated by long pivot sequences.
void reinvert(std::vector<double>& T, const std::vector<double>& A, const std::vector<std::size_t>& basis,
              std::size_t m, std::size_t n) {
  const std::size_t width = m + n + 1;
  // Augmented system [B | A b] with B's column r = A's column basis[r].
  const std::size_t aw = n + width;
  std::vector<double> W(n * aw, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < n; ++r) W[k * aw + r] = A[k * width + basis[r]];
    for (std::size_t c = 0; c < width; ++c) W[k * aw + n + c] = A[k * width + c];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t k = col + 1; k < n; ++k) {
      if (std::abs(W[k * aw + col]) > std::abs(W[piv * aw + col])) piv = k;
    }
    if (std::abs(W[piv * aw + col]) < 1e-14) throw std::logic_error("simplex basis became singular");
    if (piv != col) {
      for (std::size_t c = 0; c < aw; ++c) std::swap(W[piv * aw + c], W[col * aw + c]);
    }
    const double p = W[col * aw + col];
    for (std::size_t c = col; c < aw; ++c) W[col * aw + c] /= p;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == col) continue;
      const double f = W[k * aw + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < aw; ++c) W[k * aw + c] -= f * W[col * aw + c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < width; ++c) T[r * width + c] = W[r * aw + n + c];
  }
  // Objective row: c_B B^-1 [A b] - [c 0] with c = 1 on the y columns.
  for (std::size_t c = 0; c < width; ++c) {
    double v = (c < m) ? -1.0 : 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (basis[r] < m) v += T[r * width + c];
    }
    T[n * width + c] = v;
  }
  for (std::size_t r = 0; r < n; ++r) T[r * width + basis[r]] = 1.0;
}

// max sum(y) s.t. (M + 2)^T y <= 1, y >= 0. Slack reduced costs at the
// optimum give the dual solution x of min sum(x) s.t. (M + 2) x >= 1.
//
// Dantzig pricing with the largest pivot among near-ties; after a run of
// degenerate pivots it drops to Bland's rule with exact ties until the
// objective moves again.
Raw solve_tableau(const GameMatrix& M, const std::vector<std::size_t>& row_perm,
                  const std::vector<std::size_t>& col_perm) {
  const std::size_t m = M.rows();
  const std::size_t n = M.cols();
  const std::size_t width = m + n + 1;
  std::vector<double> A(n * width, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m; ++i) A[k * width + i] = M(row_perm[i], col_perm[k]) + kShift;
    A[k * width + m + k] = 1.0;
    A[k * width + width - 1] = 1.0;
  }
  std::vector<double> T((n + 1) * width, 0.0);
  std::copy(A.begin(), A.end(), T.begin());
  auto at = [&](std::size_t r, std::size_t c) -> double& { return T[r * width + c]; };
  for (std::size_t i = 0; i < m; ++i) at(n, i) = -1.0;

  std::vector<std::size_t> basis(n);
  std::iota(basis.begin(), basis.end(), m);

  Raw out;
  const std::size_t max_pivots = 50 * (m + n) + 1000;
  const std::size_t reinvert_every = std::max<std::size_t>(200, n);
  std::size_t since_reinvert = 0;
  std::size_t degenerate = 0;
  bool bland = false;
  bool fresh = true;  // tableau was just rebuilt
  while (true) {
    if (since_reinvert >= reinvert_every) {
      reinvert(T, A, basis, m, n);
      since_reinvert = 0;
      fresh = true;
    }
    std::size_t enter = width;
    double most = -kPivotEps;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (at(n, c) < most) {
        enter = c;
        if (bland) break;
        most = at(n, c);
      }
    }
    if (enter == width) {
      if (fresh) break;
      // Confirm optimality on a clean tableau.
      reinvert(T, A, basis, m, n);
      since_reinvert = 0;
      fresh = true;
      continue;
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
      if (at(r, enter) > kRatioEps) best = std::min(best, at(r, width - 1) / at(r, enter));
    }
    std::size_t leave = n;
    for (std::size_t r = 0; r < n; ++r) {
      const double a = at(r, enter);
      if (a <= kRatioEps) continue;
      const double ratio = at(r, width - 1) / a;
      if (bland) {
        // Ties are exact; a tolerance here lets Bland's rule cycle.
        if (ratio > best) continue;
        if (leave == n || basis[r] < basis[leave]) leave = r;
      } else {
        if (ratio > best + 1e-12 * (1.0 + std::abs(best))) continue;
        if (leave == n || a > at(leave, enter)) leave = r;
      }
    }
    if (leave == n) throw std::logic_error("simplex reported an unbounded game LP");

    const double before = at(n, width - 1);
    const double p = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= p;
    for (std::size_t r = 0; r <= n; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
      at(r, enter) = 0.0;
    }
    basis[leave] = enter;
    fresh = false;
    ++since_reinvert;
    if (at(n, width - 1) > before + 1e-13) {
      degenerate = 0;
      bland = false;
    } else if (++degenerate > 50) {
      bland = true;
    }
    if (++out.pivots > max_pivots) throw std::logic_error("simplex exceeded its pivot budget");
  }

  out.y.assign(m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    if (basis[r] < m) out.y[row_perm[basis[r]]] = std::max(0.0, at(r, width - 1));
  }
  out.x.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) out.x[col_perm[k]] = std::max(0.0, at(n, m + k));
  return out;
}

std::vector<double> normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(total > 0.0)) throw std::logic_error("simplex returned a zero vector");
  for (auto& e : v) e /= total;
  return v;
}

LPSolution certify(const GameMatrix& M, const Raw& raw) {
  LPSolution sol;
  sol.pivots = raw.pivots;
  sol.d_star = normalized(raw.y);
  sol.lambda_star = normalized(raw.x);
  const auto margins = M.multiply(sol.lambda_star);
  const double primal = *std::min_element(margins.begin(), margins.end());
  const WeightDist d(sol.d_star);
  double dual = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < M.cols(); ++j) dual = std::max(dual, edge(M, d, j));
  sol.gap = std::abs(dual - primal);
  sol.rho = 0.5 * (primal + dual);
  return sol;
}

}  // namespace

LPSolution max_margin(const GameMatrix& M) {
  std::vector<std::size_t> rows(M.rows());
  std::vector<std::size_t> cols(M.cols());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});

  LPSolution best = certify(M, solve_tableau(M, rows, cols));
  std::mt19937_64 rng(0x5eed);
  for (int attempt = 0; attempt < 4 && !best.certified(); ++attempt) {
    if (attempt == 0) {
      std::reverse(rows.begin(), rows.end());
      std::reverse(cols.begin(), cols.end());
    } else {
      std::shuffle(rows.begin(), rows.end(), rng);
      std::shuffle(cols.begin(), cols.end(), rng);
    }
    LPSolution next = certify(M, solve_tableau(M, rows, cols));
    if (next.gap < best.gap) best = std::move(next);
  }
  return best;
}

double brute_force_value(const GameMatrix& M, int grid) {
  const std::size_t n = M.cols();
  if (n > 4) throw std::invalid_argument("brute_force_value supports n <= 4");
  if (grid < 10) throw std::invalid_argument("brute_force_value needs grid >= 10");
  const std::size_t m = M.rows();
  const double step = 1.0 / grid;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> k(4, 0);
  std::vector<double> lam(n);

  auto eval = [&]() {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += lam[j] * M(i, j);
      lo = std::min(lo, v);
    }
    best = std::max(best, lo);
  };

  // k[0..n-2] free, the last coordinate takes the remainder.
  const int free_dims = static_cast<int>(n) - 1;
  for (k[0] = 0; k[0] <= (free_dims >= 1 ? grid : 0); ++k[0]) {
    for (k[1] = 0; k[1] <= (free_dims >= 2 ? grid - k[0] : 0); ++k[1]) {
      for (k[2] = 0; k[2] <= (free_dims >= 3 ? grid - k[0] - k[1] : 0); ++k[2]) {
        int used = 0;
        for (int j = 0; j < free_dims; ++j) {
          lam[j] = k[j] * step;
          used += k[j];
        }
        lam[n - 1] = (grid - used) * step;
        eval();
      }
    }
  }
  return best;
}

}  // namespace mboost
