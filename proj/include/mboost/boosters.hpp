#pragma once

// The boosting loop shared by AdaBoost, coordinate ascent boosting
// (line search on the smooth margin), approximate coordinate ascent boosting
// and arc-gv. Only the step-size rule differs between them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mboost/margin_core.hpp"
#include "mboost/weak_learners.hpp"

namespace mboost {

enum class StepRule { AdaBoost, CoordinateAscent, ApproxCoordinateAscent, ArcGv };

std::string to_string(StepRule rule);
/// Accepts adaboost, alg1, alg2, arcgv.
StepRule parse_step_rule(const std::string& name);

struct OptimalLearner {};
struct GoalEdgeLearner {
  double goal = 0.5;
};
using Learner = std::variant<OptimalLearner, GoalEdgeLearner, BoundedEdgeParams>;

struct RunConfig {
  StepRule rule = StepRule::AdaBoost;
  std::size_t max_iters = 1000;
  Learner learner = OptimalLearner{};
  // Run AdaBoost steps until G > 0, then the chosen rule.
  bool g_switch = true;
  // Stop once rho - max_{l<=t} mu_l <= stop_eps and rho - g_t <= stop_g_eps
  // (whichever are set); both need rho.
  std::optional<double> stop_eps;
  std::optional<double> stop_g_eps;
  // Maximum margin when known (from the LP oracle); guards nonseparable input.
  std::optional<double> rho;
  bool allow_nonseparable = false;
  std::uint64_t seed = 0;
  // Keep d_t for every round (needed for cycle detection).
  bool keep_weights = false;
  std::size_t recompute_every = 1024;
};

struct RunResult {
  std::vector<IterationRecord> records;
  // d_1 .. d_{T+1} when keep_weights is set.
  std::vector<WeightDist> weights;
  // Number of steps after which G first became positive.
  std::optional<std::size_t> t_tilde;
  ModelState final_state;
  // Columns used by the run; for implicit learners this is the pool of
  // generated columns (deduplicated) and record.j indexes into it.
  GameMatrix columns;
  bool stopped_early = false;
};

/// AdaBoost step atanh(r); requires 0 < r < 1.
double ada_step(double r);

/// Approximate coordinate ascent step atanh(r) - atanh(g) with 0 <= g < r < 1.
double alg2_step(double r, double g);

/// arc-gv step atanh(r) - atanh(mu) with -1 < mu <= r < 1.
double arc_step(double r, double mu);

/// f(alpha) = s g + ln(cosh gamma / cosh(gamma - alpha)) - (s + alpha) tanh(gamma - alpha).
double line_search_objective(double s, double g, double gamma, double alpha);

/// Unique root of line_search_objective on (0, gamma] by bisection.
/// Requires 0 <= g < tanh(gamma) and s > 0.
double alg1_line_search(double s, double g, double gamma);

RunResult run(const GameMatrix& M, const RunConfig& config);

/// Runs against columns generated on demand (bounded-edge learner only).
RunResult run_implicit(const RunConfig& config);

/// Starting point of a recursion-level run: lambda is summarized by s and ln F.
struct ScriptedStart {
  double s = 0.0;
  double logF = 0.0;

  static ScriptedStart origin(std::size_t m);
  /// State with given s > 0 and smooth margin g.
  static ScriptedStart at(double s, double g);
};

/// Runs the step rules against scripted edges using only the exact
/// recursions for ln F and G. Margins are unavailable, so record.mu is NaN and
/// arc-gv is rejected.
RunResult run_scripted(const EdgeScript& script, const RunConfig& config, ScriptedStart start);

}  // namespace mboost
