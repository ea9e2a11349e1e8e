#pragma once

// Cycle detection on weight traces, diagnostics on detected cycles, and the
// two-variable recursion for approximate coordinate ascent under constant edges.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mboost/margin_core.hpp"

namespace mboost {

struct CycleReport {
  std::size_t period = 0;
  // Index into the weight trace from which every later pair (t, t + period)
  // agrees within tolerance.
  std::size_t start = 0;
  std::vector<double> cycle_edges;
  std::vector<std::size_t> support_set;
  std::map<std::size_t, int> tau;
  std::map<std::size_t, double> condition_residuals;
  bool equal_edges = false;
  bool tau_uniform = false;
  bool tau_in_range = false;
  double max_residual = 0.0;
};

/// Smallest period T <= t_max with ||d_{t+T} - d_t||_inf <= tol over a tail
/// window of at least 2T pairs. Returns a skeleton (period, start) or nothing.
/// Needs trace.size() >= 2 t_max.
std::optional<CycleReport> detect_cycle(std::span<const WeightDist> trace, double tol,
                                        std::size_t t_max);

/// Fills in the cycle edges, support vectors (d > sv_tol over the last
/// period), tau_i and the products prod_t (1 + M_{i j_t} r_t) over the last
/// `period` records. `weights` must hold records.size() + 1 entries.
/// Throws std::runtime_error if the final window does not repeat.
CycleReport cycle_diagnostics(const GameMatrix& M, std::span<const IterationRecord> records,
                              std::span<const WeightDist> weights, CycleReport report,
                              double tol = 1e-9, double sv_tol = 1e-7, double edge_tol = 1e-7);

struct MonotonicityScan {
  std::size_t increases = 0;
  std::size_t decreases = 0;
  // Decreases inside each consecutive window of `period` differences.
  std::vector<std::size_t> decreases_per_window;
  bool decrease_every_window = false;
  // |g_t - target| when a target is given.
  std::vector<double> residual;
  bool residual_eventually_decreasing = false;
};

/// Counts strict increases and decreases of g_{t+1} - g_t beyond `band`.
/// With period > 0, also counts decreases per window; with a target, reports
/// |g_t - target| and whether it is nonincreasing over the second half.
MonotonicityScan smooth_margin_monotonicity_scan(std::span<const double> g, std::size_t period = 0,
                                                 std::optional<double> target = std::nullopt,
                                                 double band = 1e-12);

struct RecursionState {
  std::size_t t = 0;
  double s = 0.0;
  double g = 0.0;
  double x = 0.0;  // rho - g
  double alpha = 0.0;  // step that produced this state (0 at t = 0)
};

/// Iterates s_{t+1} = s_t + atanh(rho) - atanh(g_t) and
/// s_{t+1} g_{t+1} = s_t g_t + (ln(1 - g_t^2) - ln(1 - rho^2)) / 2.
/// Returns steps + 1 states starting from (s0, g0).
std::vector<RecursionState> scripted_recursion(double rho, double g0, double s0, std::size_t steps);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  double early_slope = 0.0;
  double late_slope = 0.0;
  // False when the two halves of the window disagree (curvature in log-log).
  bool power_law = false;
};

/// Least-squares slope of ln x against ln t over [t_lo, t_hi], using at most
/// 200 log-spaced points. `trace` holds (t, x) sorted by t.
DecayFit decay_exponent(std::span<const std::pair<double, double>> trace, double t_lo, double t_hi);

}  // namespace mboost
