#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mboost/margin_core.hpp"

namespace mboost {

/// A weak classifier picked for one round: either a column of M or an
/// explicit +/-1 column generated on demand, together with its edge.
struct WeakSelection {
  std::variant<std::size_t, std::vector<std::int8_t>> column;
  double r = 0.0;
  // Prefix length for bounded-edge selections (number of +1 entries).
  std::size_t i_bar = 0;

  bool is_implicit() const { return column.index() == 1; }
  std::size_t index() const { return std::get<0>(column); }
  const std::vector<std::int8_t>& implicit_column() const { return std::get<1>(column); }
};

/// Parameters of the bounded-edge construction: every realized edge lies in
/// [rho_bar, rho_bar + sigma] and weight ratios never exceed phi.
class BoundedEdgeParams {
 public:
  /// Validates phi >= (1 + rho_bar + sigma) / (1 - rho_bar - sigma),
  /// rho_bar + sigma < 1, m >= 2 phi / sigma and integrality of
  /// m (rho_bar + 1) / 2. A nonpositive phi selects the smallest admissible one.
  static BoundedEdgeParams make(double rho_bar, double sigma, double phi, std::size_t m);

  /// Smallest m >= 2 meeting both size constraints, or 0 if none below 10^7.
  static std::size_t smallest_admissible_m(double rho_bar, double sigma, double phi);
  static double min_phi(double rho_bar, double sigma);

  double rho_bar() const { return rho_bar_; }
  double sigma() const { return sigma_; }
  double phi() const { return phi_; }
  std::size_t m() const { return m_; }
  std::size_t cap() const { return cap_; }

 private:
  double rho_bar_ = 0.0;
  double sigma_ = 0.0;
  double phi_ = 0.0;
  std::size_t m_ = 0;
  std::size_t cap_ = 0;
};

/// Edge values fed to recursion-level runs, with no matrix behind them.
class EdgeScript {
 public:
  enum class Mode { Constant, Finite, Cyclic };

  static EdgeScript constant(double r);
  static EdgeScript finite(std::vector<double> edges);
  static EdgeScript cyclic(std::vector<double> edges);
  /// One edge per line; blank lines and lines starting with '#' are skipped.
  static EdgeScript load(const std::string& path, Mode mode = Mode::Finite);

  Mode mode() const { return mode_; }
  const std::vector<double>& edges() const { return edges_; }
  /// Edge at 0-based round t.
  double at(std::size_t t) const;
  bool bounded_length() const { return mode_ == Mode::Finite; }

 private:
  Mode mode_ = Mode::Constant;
  std::vector<double> edges_;
};

/// All edges (d^T M)_j.
std::vector<double> all_edges(const GameMatrix& M, const WeightDist& d);

/// Maximum-edge column, lowest index on ties.
WeakSelection optimal_select(const GameMatrix& M, const WeightDist& d);

/// Among columns with strictly positive edge, the one closest to r_goal
/// (lowest index on ties). Throws std::runtime_error if no edge is positive.
WeakSelection goal_edge_select(const GameMatrix& M, const WeightDist& d, double r_goal);

/// Sorts examples by weight (descending, stable) and returns the implicit
/// column that is +1 on the shortest heavy prefix whose edge reaches rho_bar.
WeakSelection bounded_edge_select(const WeightDist& d, const BoundedEdgeParams& params);

/// Indices of d sorted by descending weight, ties by original index.
std::vector<std::size_t> descending_order(const WeightDist& d);

/// K_t = max(max_{i,k} d_i / d_k, phi).
double weight_ratio_stat(const WeightDist& d, double phi);

/// The iterated form of the AdaBoost weight update on a prefix column:
/// d_i / (1 + r) for the first i_bar entries, d_i / (1 - r) after.
/// `sorted` must be in descending-weight order.
std::vector<double> weight_map_check(std::span<const double> sorted, std::size_t i_bar, double r);

/// Scripted edge for 0-based round t.
double scripted_select(const EdgeScript& script, std::size_t t);

}  // namespace mboost
