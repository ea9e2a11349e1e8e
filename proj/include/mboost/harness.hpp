#pragma once

// Experiment generators and per-step audits of the convergence bounds.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mboost/boosters.hpp"
#include "mboost/margin_core.hpp"
#include "mboost/weak_learners.hpp"

namespace mboost {

/// Points on the corners of {-1,+1}^dim labelled by the sign of the sum of
/// their first k_signal coordinates. Points are stored row-major.
struct HypercubeDataset {
  std::size_t dim = 0;
  std::size_t k_signal = 0;
  std::vector<std::int8_t> train_points;
  std::vector<std::int8_t> train_labels;
  std::vector<std::int8_t> test_points;
  std::vector<std::int8_t> test_labels;

  std::size_t train_size() const { return train_labels.size(); }
  std::size_t test_size() const { return test_labels.size(); }
};

struct HypercubeInstance {
  HypercubeDataset data;
  // 2 dim columns: h_j(x) = x(j) and then h_{dim+j} = -h_j.
  GameMatrix M;
};

/// Deterministic in all arguments. Rejects even or out-of-range k_signal.
HypercubeInstance gen_hypercube(std::size_t m, std::size_t dim, std::size_t k_signal,
                                std::size_t n_test, std::uint64_t seed);

/// Fraction of test points with sign(sum_j lambda_j h_j(x)) != y; a zero
/// score counts as an error.
double test_error(const HypercubeDataset& data, std::span<const double> lambda);

struct GoalTrial {
  std::optional<double> goal;  // empty for the optimal-learner trial
  double final_margin = 0.0;
  double mean_edge = 0.0;      // over the tail window
  double upsilon_mean_edge = 0.0;
  double margin_gap = 0.0;     // |final_margin - upsilon_mean_edge|
  double mean_goal_miss = 0.0; // mean |r_t - goal| over the tail window
  double test_error = 0.0;
  std::vector<IterationRecord> records;
};

struct GoalSuiteResult {
  std::vector<GoalTrial> trials;
  // Spearman correlation of final margin against test error over all trials.
  double spearman = 0.0;
};

/// `count` goals equally spaced strictly inside (lo, hi).
std::vector<double> equally_spaced_goals(double lo, double hi, std::size_t count);

/// AdaBoost with the goal-edge learner once per goal (plus one optimal trial
/// when include_optimal), run concurrently. Goals must lie in (rho, 1).
GoalSuiteResult run_goal_edge_suite(const HypercubeInstance& inst, std::span<const double> goals,
                                    std::size_t iters, double rho, bool include_optimal = true,
                                    std::size_t tail = 250);

/// Average-rank Spearman correlation.
double spearman(std::span<const double> a, std::span<const double> b);

struct BoundedEdgeReport {
  BoundedEdgeParams params;
  RunResult run;
  double upsilon_lo = 0.0;
  double upsilon_hi = 0.0;
  double delta = 0.0;
  std::size_t tail_begin = 0;  // first record index of the tail window
  double tail_g_min = 0.0;
  double tail_g_max = 0.0;
  bool bracket_ok = false;
  std::size_t edge_violations = 0;
  double worst_edge_excursion = 0.0;  // > 0 means outside [rho_bar, rho_bar + sigma]
  std::size_t ratio_violations = 0;   // steps with K_t != phi
  double worst_ratio = 0.0;           // max_t max_{i,k} d_i / d_k
  std::size_t cap_violations = 0;     // pool columns with more than cap positives
  std::size_t subset_cols = 0;
  double subset_rho = 0.0;            // LP value on the first subset_cols pool columns
  bool rho_consistent = false;

  bool passed() const {
    return bracket_ok && edge_violations == 0 && ratio_violations == 0 && cap_violations == 0 &&
           rho_consistent;
  }
};

/// AdaBoost with the bounded-edge learner on m examples. phi <= 0 picks the
/// smallest admissible phi. The tail window is the last tail_fraction of the run.
BoundedEdgeReport run_bounded_edge_suite(double rho_bar, double sigma, double phi, std::size_t m,
                                         std::size_t iters, double delta = 0.01,
                                         double tail_fraction = 0.1, std::size_t lp_subset = 200);

struct Violation {
  std::string check;
  std::size_t t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CheckSummary {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  // Smallest rhs - lhs seen (negative when violated).
  double worst_slack = 0.0;
  // The run ended before the check could be decided.
  bool inconclusive = false;
};

struct BoundReport {
  double rho = 0.0;
  double eps = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::optional<std::size_t> t_tilde;
  double s_tilde = 0.0;
  double warmup_bound = 0.0;
  double bound_T52 = 0.0;
  std::optional<std::size_t> first_hit;
  std::vector<double> R_t_series;
  std::vector<Violation> violations;
  std::vector<CheckSummary> checks;

  bool passed() const { return violations.empty(); }
  const CheckSummary* find(const std::string& name) const;
};

struct AuditOptions {
  double eps = 0.05;
  double slack = 1e-12;
  // Band inside which the sign test of the AdaBoost progress criterion is skipped.
  double sign_band = 1e-12;
  // r_t >= rho holds only when the learner returns a best column.
  bool optimal_learner = true;
  std::size_t max_violations_kept = 100;
};

/// Per-step audit of a complete trace against rho. Which checks run depends
/// on the rule: the sandwich and warm-up checks always; per-step progress,
/// step-size, monotonicity and first-hit checks for alg1, alg2 and arc-gv
/// (best-margin criterion for arc-gv); the adaptive forecast for alg1/alg2;
/// the sign equivalence for AdaBoost.
BoundReport audit_bounds(std::span<const IterationRecord> records, double rho, StepRule rule,
                         std::size_t m, const AuditOptions& options = {});

}  // namespace mboost
