#include "mboost/boosters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace mboost {

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::AdaBoost:
      return "adaboost";
    case StepRule::CoordinateAscent:
      return "alg1";
    case StepRule::ApproxCoordinateAscent:
      return "alg2";
    case StepRule::ArcGv:
      return "arcgv";
  }
  return "unknown";
}

StepRule parse_step_rule(const std::string& name) {
  if (name == "adaboost") return StepRule::AdaBoost;
  if (name == "alg1") return StepRule::CoordinateAscent;
  if (name == "alg2") return StepRule::ApproxCoordinateAscent;
  if (name == "arcgv") return StepRule::ArcGv;
  throw std::invalid_argument("unknown step rule '" + name + "'");
}

double ada_step(double r) {
  if (!(r > 0.0)) throw std::domain_error("AdaBoost step needs a positive edge");
  return gamma_of(r);
}

double alg2_step(double r, double g) {
  if (!(g >= 0.0)) throw std::domain_error("approximate coordinate ascent needs g >= 0");
  if (!(g < r)) throw std::domain_error("approximate coordinate ascent needs g < r");
  return gamma_of(r) - std::atanh(g);
}

double arc_step(double r, double mu) {
  if (!(mu > -1.0)) throw std::domain_error("arc-gv step needs mu > -1");
  if (mu > r) throw std::domain_error("arc-gv step needs mu <= r");
  return gamma_of(r) - std::atanh(mu);
}

double line_search_objective(double s, double g, double gamma, double alpha) {
  return s * g + log_cosh(gamma) - log_cosh(gamma - alpha) - (s + alpha) * std::tanh(gamma - alpha);
}

double alg1_line_search(double s, double g, double gamma) {
  if (!(s > 0.0)) throw std::domain_error("line search needs s > 0");
  if (!(g >= 0.0)) throw std::domain_error("line search needs g >= 0");
  double lo = 0.0;
  double hi = gamma;
  const double f_lo = line_search_objective(s, g, gamma, lo);
  const double f_hi = line_search_objective(s, g, gamma, hi);
  if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
    throw std::runtime_error("line search bracket failed: f(0) = " + std::to_string(f_lo) +
                             ", f(gamma) = " + std::to_string(f_hi));
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = line_search_objective(s, g, gamma, mid);
    if (std::abs(f) <= 1e-13) return mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

struct StepInputs {
  StepRule rule;
  bool g_switch;
  double r;
  double gamma;
  double s;
  double G;   // smooth margin before the step, -inf at s = 0
  double mu;  // margin before the step, NaN when unavailable
};

double choose_alpha(const StepInputs& in) {
  const double g = std::max(0.0, in.G);
  const bool warmup = in.g_switch && !(in.G > 0.0);
  if (in.rule == StepRule::AdaBoost || warmup) return in.gamma;
  switch (in.rule) {
    case StepRule::ApproxCoordinateAscent:
      return alg2_step(in.r, g);
    case StepRule::CoordinateAscent:
      return g > 0.0 ? alg1_line_search(in.s, g, in.gamma) : in.gamma;
    case StepRule::ArcGv:
      // mu = -1 (every coefficient on a column that misses some example) or
      // s = 0 leaves the arc-gv step undefined; AdaBoost's step is used.
      if (in.s > 0.0 && in.mu > -1.0 + kEdgeLimit) return arc_step(in.r, in.mu);
      return in.gamma;
    case StepRule::AdaBoost:
      break;
  }
  return in.gamma;
}

void validate_config(const RunConfig& config) {
  if (config.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if ((config.stop_eps || config.stop_g_eps) && !config.rho) {
    throw std::invalid_argument("stop_eps needs a known maximum margin rho");
  }
  if (config.rho && *config.rho <= 0.0) {
    if (config.rule != StepRule::AdaBoost) {
      throw std::invalid_argument("input is not separable (rho <= 0); only AdaBoost can run");
    }
    if (!config.allow_nonseparable) {
      throw std::invalid_argument(
          "input is not separable (rho <= 0); AdaBoost needs the nonseparable override");
    }
  }
  if (const auto* goal = std::get_if<GoalEdgeLearner>(&config.learner)) {
    if (!(goal->goal > 0.0 && goal->goal < 1.0)) {
      throw std::invalid_argument("goal edge must lie in (0, 1)");
    }
  }
}

RunResult run_impl(const GameMatrix* fixed, const RunConfig& config) {
  validate_config(config);
  RunResult out;
  const auto* bounded = std::get_if<BoundedEdgeParams>(&config.learner);
  if (bounded) {
    out.columns = GameMatrix::empty_pool(bounded->m());
  } else {
    if (!fixed) throw std::invalid_argument("explicit learners need a game matrix");
    out.columns = *fixed;
  }
  GameMatrix& M = out.columns;
  std::map<std::vector<std::int8_t>, std::size_t> pool_index;

  const std::size_t m = M.rows();
  WeightDist d = WeightDist::uniform(m);
  ModelState state = ModelState::zero(M);
  double G = -std::numeric_limits<double>::infinity();
  double mu = std::numeric_limits<double>::quiet_NaN();
  double best_mu = -std::numeric_limits<double>::infinity();

  out.records.reserve(config.max_iters);
  if (config.keep_weights) {
    out.weights.reserve(config.max_iters + 1);
    out.weights.push_back(d);
  }

  for (std::size_t t = 1; t <= config.max_iters; ++t) {
    WeakSelection sel;
    if (bounded) {
      sel = bounded_edge_select(d, *bounded);
    } else if (const auto* goal = std::get_if<GoalEdgeLearner>(&config.learner)) {
      sel = goal_edge_select(M, d, goal->goal);
    } else {
      sel = optimal_select(M, d);
    }
    std::size_t j = 0;
    if (sel.is_implicit()) {
      const auto [it, inserted] = pool_index.try_emplace(sel.implicit_column(), M.cols());
      if (inserted) M.append_column(sel.implicit_column());
      j = it->second;
    } else {
      j = sel.index();
    }

    const double r = sel.r;
    if (!(r > 0.0)) {
      throw std::runtime_error("selected edge " + std::to_string(r) + " at round " +
                               std::to_string(t) + " is not positive");
    }
    const double gamma = gamma_of(r);
    const double alpha = choose_alpha({config.rule, config.g_switch, r, gamma, state.s, G, mu});

    state.apply_step(M, j, alpha);
    d = update_weights(d, M.column(j), alpha);
    if (config.recompute_every && t % config.recompute_every == 0) state.recompute_margins(M);

    G = smooth_margin(state);
    mu = margin(state);
    best_mu = std::max(best_mu, mu);

    IterationRecord rec;
    rec.t = t;
    rec.j = static_cast<std::int64_t>(j);
    rec.implicit = sel.is_implicit();
    rec.r = r;
    rec.gamma = gamma;
    rec.alpha = alpha;
    rec.s = state.s;
    rec.g = G;
    rec.mu = mu;
    rec.logF = exp_loss_log(state);
    out.records.push_back(rec);
    if (config.keep_weights) out.weights.push_back(d);
    if (!out.t_tilde && G > 0.0) out.t_tilde = t;

    const bool mu_done = !config.stop_eps || *config.rho - best_mu <= *config.stop_eps;
    const bool g_done = !config.stop_g_eps || *config.rho - G <= *config.stop_g_eps;
    if ((config.stop_eps || config.stop_g_eps) && mu_done && g_done) {
      out.stopped_early = t < config.max_iters;
      break;
    }
  }
  state.lambda.resize(M.cols(), 0.0);
  out.final_state = std::move(state);
  return out;
}

}  // namespace

RunResult run(const GameMatrix& M, const RunConfig& config) {
  if (std::holds_alternative<BoundedEdgeParams>(config.learner)) {
    const auto& p = std::get<BoundedEdgeParams>(config.learner);
    if (p.m() != M.rows()) throw std::invalid_argument("bounded-edge params.m does not match M");
  }
  return run_impl(&M, config);
}

RunResult run_implicit(const RunConfig& config) {
  if (!std::holds_alternative<BoundedEdgeParams>(config.learner)) {
    throw std::invalid_argument("implicit runs need the bounded-edge learner");
  }
  return run_impl(nullptr, config);
}

ScriptedStart ScriptedStart::origin(std::size_t m) {
  if (m < 2) throw std::invalid_argument("need m >= 2");
  return {0.0, std::log(static_cast<double>(m))};
}

ScriptedStart ScriptedStart::at(double s, double g) {
  if (!(s > 0.0)) throw std::invalid_argument("scripted start needs s > 0");
  return {s, -s * g};
}

RunResult run_scripted(const EdgeScript& script, const RunConfig& config, ScriptedStart start) {
  if (config.rule == StepRule::ArcGv) {
    throw std::invalid_argument("arc-gv needs margins; scripted runs cannot provide them");
  }
  if (config.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  RunResult out;
  double s = start.s;
  double logF = start.logF;
  double G = s > 0.0 ? -logF / s : -std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (G > 0.0) out.t_tilde = 0;
  out.records.reserve(config.max_iters);
  for (std::size_t t = 1; t <= config.max_iters; ++t) {
    const double r = scripted_select(script, t - 1);
    const double gamma = gamma_of(r);
    const double alpha = choose_alpha({config.rule, config.g_switch, r, gamma, s, G, nan});
    const auto next = recursion_check(logF, G > 0.0 || s > 0.0 ? G : 0.0, s, gamma, alpha);
    s += alpha;
    logF = next.logF;
    G = next.g;

    IterationRecord rec;
    rec.t = t;
    rec.j = -1;
    rec.r = r;
    rec.gamma = gamma;
    rec.alpha = alpha;
    rec.s = s;
    rec.g = G;
    rec.mu = nan;
    rec.logF = logF;
    out.records.push_back(rec);
    if (!out.t_tilde && G > 0.0) out.t_tilde = t;
  }
  return out;
}

}  // namespace mboost
