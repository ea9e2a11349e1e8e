#include "mboost/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mboost/margin_lp.hpp"

namespace mboost {

namespace {

void fill_points(std::mt19937_64& rng, std::size_t count, std::size_t dim, std::size_t k_signal,
                 std::vector<std::int8_t>& points, std::vector<std::int8_t>& labels) {
  points.resize(count * dim);
  labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    int sum = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      // Top bit of a raw draw: identical on every platform for a given seed.
      const std::int8_t v = (rng() >> 63) ? 1 : -1;
      points[i * dim + k] = v;
      if (k < k_signal) sum += v;
    }
    labels[i] = sum > 0 ? 1 : -1;
  }
}

}  // namespace

HypercubeInstance gen_hypercube(std::size_t m, std::size_t dim, std::size_t k_signal,
                                std::size_t n_test, std::uint64_t seed) {
  if (k_signal % 2 == 0) throw std::invalid_argument("k_signal must be odd");
  if (k_signal > dim) throw std::invalid_argument("k_signal must not exceed dim");
  if (m < 2) throw std::invalid_argument("need m >= 2 training points");
  HypercubeDataset data;
  data.dim = dim;
  data.k_signal = k_signal;
  std::mt19937_64 rng(seed);
  fill_points(rng, m, dim, k_signal, data.train_points, data.train_labels);
  fill_points(rng, n_test, dim, k_signal, data.test_points, data.test_labels);

  std::vector<std::int8_t> cols(m * 2 * dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto v = static_cast<std::int8_t>(data.train_labels[i] * data.train_points[i * dim + j]);
      cols[j * m + i] = v;
      cols[(dim + j) * m + i] = static_cast<std::int8_t>(-v);
    }
  }
  GameMatrix M(m, 2 * dim, std::move(cols));
  return {std::move(data), std::move(M)};
}

double test_error(const HypercubeDataset& data, std::span<const double> lambda) {
  const std::size_t dim = data.dim;
  if (lambda.size() != 2 * dim) throw std::invalid_argument("lambda must have 2 dim entries");
  if (data.test_size() == 0) throw std::invalid_argument("dataset has no test points");
  std::vector<double> w(dim);
  for (std::size_t j = 0; j < dim; ++j) w[j] = lambda[j] - lambda[dim + j];
  std::size_t errors = 0;
  for (std::size_t i = 0; i < data.test_size(); ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < dim; ++j) score += w[j] * data.test_points[i * dim + j];
    if (!(score * data.test_labels[i] > 0.0)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.test_size());
}

std::vector<double> equally_spaced_goals(double lo, double hi, std::size_t count) {
  if (!(hi > lo)) throw std::invalid_argument("goal range is empty");
  std::vector<double> out;
  for (std::size_t k = 1; k <= count; ++k) {
    out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count + 1));
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t k = i;
    while (k + 1 < idx.size() && v[idx[k + 1]] == v[idx[i]]) ++k;
    const double avg = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t q = i; q <= k; ++q) ranks[idx[q]] = avg;
    i = k + 1;
  }
  return ranks;
}

GoalTrial goal_trial(const HypercubeInstance& inst, std::optional<double> goal, std::size_t iters,
                     double rho, std::size_t tail) {
  RunConfig cfg;
  cfg.rule = StepRule::AdaBoost;
  cfg.max_iters = iters;
  cfg.rho = rho;
  if (goal) {
    cfg.learner = GoalEdgeLearner{*goal};
  } else {
    cfg.learner = OptimalLearner{};
  }
  auto res = run(inst.M, cfg);

  GoalTrial trial;
  trial.goal = goal;
  const std::size_t n = res.records.size();
  const std::size_t first = n > tail ? n - tail : 0;
  double edge_sum = 0.0;
  double miss_sum = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    const double r = res.records[k].r;
    if (!(r > 0.0 && r < 1.0)) throw std::runtime_error("realized edge left (0, 1)");
    edge_sum += r;
    if (goal) miss_sum += std::abs(r - *goal);
  }
  const auto count = static_cast<double>(n - first);
  trial.mean_edge = edge_sum / count;
  trial.mean_goal_miss = miss_sum / count;
  trial.final_margin = res.records.back().mu;
  trial.upsilon_mean_edge = upsilon(trial.mean_edge);
  trial.margin_gap = std::abs(trial.final_margin - trial.upsilon_mean_edge);
  trial.test_error = test_error(inst.data, res.final_state.lambda);
  trial.records = std::move(res.records);
  return trial;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman needs two paired samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

GoalSuiteResult run_goal_edge_suite(const HypercubeInstance& inst, std::span<const double> goals,
                                    std::size_t iters, double rho, bool include_optimal,
                                    std::size_t tail) {
  if (!(rho > 0.0)) throw std::invalid_argument("goal-edge suite needs a separable dataset");
  for (double goal : goals) {
    if (!(goal > rho && goal < 1.0)) {
      throw std::invalid_argument("goal " + std::to_string(goal) + " is outside (rho, 1)");
    }
  }
  std::vector<std::future<GoalTrial>> jobs;
  if (include_optimal) {
    jobs.push_back(std::async(std::launch::async, goal_trial, std::cref(inst), std::nullopt, iters,
                              rho, tail));
  }
  for (double goal : goals) {
    jobs.push_back(std::async(std::launch::async, goal_trial, std::cref(inst),
                              std::optional<double>(goal), iters, rho, tail));
  }
  GoalSuiteResult out;
  for (auto& job : jobs) out.trials.push_back(job.get());
  std::vector<double> margins;
  std::vector<double> errors;
  for (const auto& trial : out.trials) {
    margins.push_back(trial.final_margin);
    errors.push_back(trial.test_error);
  }
  out.spearman = out.trials.size() >= 2 ? spearman(margins, errors) : 0.0;
  return out;
}

BoundedEdgeReport run_bounded_edge_suite(double rho_bar, double sigma, double phi, std::size_t m,
                                         std::size_t iters, double delta, double tail_fraction,
                                         std::size_t lp_subset) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("tail fraction must lie in (0, 1]");
  }
  BoundedEdgeReport rep;
  rep.params = BoundedEdgeParams::make(rho_bar, sigma, phi, m);
  rep.delta = delta;
  rep.upsilon_lo = upsilon(rho_bar);
  rep.upsilon_hi = upsilon(rho_bar + sigma);

  RunConfig cfg;
  cfg.rule = StepRule::AdaBoost;
  cfg.max_iters = iters;
  cfg.learner = rep.params;
  cfg.keep_weights = true;
  rep.run = run_implicit(cfg);
  const auto& recs = rep.run.records;

  const double hi_edge = rho_bar + sigma;
  rep.worst_edge_excursion = -std::numeric_limits<double>::infinity();
  for (const auto& rec : recs) {
    const double excursion = std::max(rho_bar - rec.r, rec.r - hi_edge);
    rep.worst_edge_excursion = std::max(rep.worst_edge_excursion, excursion);
    if (excursion > 1e-12) ++rep.edge_violations;
  }

  const double phi_used = rep.params.phi();
  for (const auto& d : rep.run.weights) {
    const auto [lo, hi] = std::minmax_element(d.weights().begin(), d.weights().end());
    const double ratio = *hi / *lo;
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (weight_ratio_stat(d, phi_used) > phi_used * (1.0 + 1e-12)) ++rep.ratio_violations;
  }

  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(recs.size())));
  rep.tail_begin = recs.size() - std::min(tail, recs.size());
  rep.tail_g_min = std::numeric_limits<double>::infinity();
  rep.tail_g_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = rep.tail_begin; k < recs.size(); ++k) {
    rep.tail_g_min = std::min(rep.tail_g_min, recs[k].g);
    rep.tail_g_max = std::max(rep.tail_g_max, recs[k].g);
  }
  rep.bracket_ok = rep.tail_g_min >= rep.upsilon_lo - delta && rep.tail_g_max <= rep.upsilon_hi + delta;

  const GameMatrix& pool = rep.run.columns;
  for (std::size_t j = 0; j < pool.cols(); ++j) {
    const auto col = pool.column(j);
    const auto positives = static_cast<std::size_t>(std::count(col.begin(), col.end(), 1));
    if (positives > rep.params.cap()) ++rep.cap_violations;
  }
  rep.subset_cols = std::min(lp_subset, pool.cols());
  if (rep.subset_cols > 0) {
    std::vector<std::int8_t> data;
    for (std::size_t j = 0; j < rep.subset_cols; ++j) {
      const auto col = pool.column(j);
      data.insert(data.end(), col.begin(), col.end());
    }
    const auto lp = max_margin(GameMatrix(pool.rows(), rep.subset_cols, std::move(data)));
    rep.subset_rho = lp.rho;
    rep.rho_consistent = rep.cap_violations == 0 && lp.certified() && lp.rho <= rho_bar + 1e-9;
  }
  return rep;
}

const CheckSummary* BoundReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

class Auditor {
 public:
  Auditor(BoundReport& report, const AuditOptions& opts) : report_(report), opts_(opts) {}

  CheckSummary& summary(const std::string& name) {
    for (auto& c : report_.checks) {
      if (c.name == name) return c;
    }
    CheckSummary c;
    c.name = name;
    c.worst_slack = std::numeric_limits<double>::infinity();
    report_.checks.push_back(c);
    return report_.checks.back();
  }

  // Records lhs <= rhs (with the audit slack).
  void le(const std::string& name, std::size_t t, double lhs, double rhs) {
    auto& c = summary(name);
    ++c.checked;
    c.worst_slack = std::min(c.worst_slack, rhs - lhs);
    if (!(lhs <= rhs + opts_.slack)) fail(c, t, lhs, rhs);
  }

  void fail(CheckSummary& c, std::size_t t, double lhs, double rhs) {
    ++c.violations;
    if (report_.violations.size() < opts_.max_violations_kept) {
      report_.violations.push_back({c.name, t, lhs, rhs});
    } else if (report_.violations.size() == opts_.max_violations_kept) {
      // Keep the list nonempty and bounded; counts live in the summaries.
      report_.violations.push_back({"(more)", t, lhs, rhs});
    }
  }

  void inconclusive(const std::string& name) { summary(name).inconclusive = true; }

 private:
  BoundReport& report_;
  const AuditOptions& opts_;
};

bool uses_smooth_margin_rule(StepRule rule) {
  return rule == StepRule::CoordinateAscent || rule == StepRule::ApproxCoordinateAscent ||
         rule == StepRule::ArcGv;
}

}  // namespace

BoundReport audit_bounds(std::span<const IterationRecord> records, double rho, StepRule rule,
                         std::size_t m, const AuditOptions& options) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("audit needs 0 < rho < 1");
  if (m < 2) throw std::invalid_argument("audit needs m >= 2");
  BoundReport rep;
  rep.rho = rho;
  rep.eps = options.eps;
  rep.c1 = std::log(2.0) / (1.0 - rho);
  rep.c2 = rho / (1.0 - rho);
  rep.warmup_bound = 2.0 * std::log(static_cast<double>(m)) / -std::log1p(-rho * rho) + 1.0;
  Auditor audit(rep, options);
  const std::size_t n = records.size();
  if (n == 0) return rep;

  std::size_t tt_index = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (records[k].g > 0.0) {
      tt_index = k;
      break;
    }
  }
  if (tt_index < n) {
    rep.t_tilde = records[tt_index].t;
    rep.s_tilde = records[tt_index].s;
  }
  const double exponent = (3.0 - rho) / (1.0 - rho);
  if (rep.t_tilde) {
    rep.bound_T52 = static_cast<double>(*rep.t_tilde) +
                    (rep.s_tilde + std::log(2.0)) * std::pow(options.eps, -exponent);
  }

  // Running minimum of the edges.
  rep.R_t_series.reserve(n);
  double R = std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    R = std::min(R, rec.r);
    rep.R_t_series.push_back(R);
  }

  const double log_m = std::log(static_cast<double>(m));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& rec = records[k];
    if (options.optimal_learner) audit.le("edge_at_least_rho", rec.t, rho, rec.r);
    if (k < tt_index) continue;
    audit.le("sandwich_lower", rec.t, -log_m / rec.s + rec.mu, rec.g);
    audit.le("sandwich_g_below_mu", rec.t, rec.g, rec.mu);
    audit.le("sandwich_mu_below_rho", rec.t, rec.mu, rho);
  }

  if (options.optimal_learner) {
    if (rep.t_tilde) {
      audit.le("warmup", *rep.t_tilde, static_cast<double>(*rep.t_tilde), rep.warmup_bound);
    } else if (static_cast<double>(records.back().t) >= rep.warmup_bound) {
      audit.le("warmup", records.back().t, static_cast<double>(records.back().t) + 1.0,
               rep.warmup_bound);
    } else {
      audit.inconclusive("warmup");
    }
  }

  if (uses_smooth_margin_rule(rule)) {
    for (std::size_t k = std::max<std::size_t>(tt_index + 1, 1); k < n; ++k) {
      const auto& prev = records[k - 1];
      const auto& cur = records[k];
      audit.le("lemma_progress", cur.t, cur.alpha * (cur.r - prev.g) / (2.0 * cur.s), cur.g - prev.g);
      audit.le("lemma_step_size", cur.t, cur.alpha, rep.c1 + rep.c2 * prev.s);
      audit.le("g_nondecreasing", cur.t, prev.g, cur.g);
    }

    const std::string name = rule == StepRule::ArcGv ? "first_hit_best_margin" : "first_hit_smooth_margin";
    double best_mu = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      best_mu = std::max(best_mu, records[k].mu);
      const double value = rule == StepRule::ArcGv ? best_mu : records[k].g;
      if (rho - value <= options.eps) {
        rep.first_hit = records[k].t;
        break;
      }
    }
    if (rep.t_tilde) {
      if (rep.first_hit) {
        audit.le(name, *rep.first_hit, static_cast<double>(*rep.first_hit), rep.bound_T52);
      } else if (static_cast<double>(records.back().t) >= rep.bound_T52) {
        audit.le(name, records.back().t, static_cast<double>(records.back().t) + 1.0, rep.bound_T52);
      } else {
        audit.inconclusive(name);
      }
    } else if (rep.first_hit) {
      // G never turned positive, so the bound exceeds the last recorded step.
      audit.le(name, *rep.first_hit, static_cast<double>(*rep.first_hit),
               static_cast<double>(records.back().t) + 1.0);
    } else {
      audit.inconclusive(name);
    }
  }

  if (rep.t_tilde && (rule == StepRule::CoordinateAscent || rule == StepRule::ApproxCoordinateAscent)) {
    // Forecast from iteration t with R_t in place of rho; checked wherever it
    // lands inside the trace.
    const std::size_t first_t = records.front().t;
    for (std::size_t k = tt_index; k < n; ++k) {
      const double Rt = rep.R_t_series[k];
      if (!(Rt < 1.0)) continue;
      const double forecast = static_cast<double>(*rep.t_tilde) +
                              (rep.s_tilde + std::log(2.0)) * std::pow(options.eps, -(3.0 - Rt) / (1.0 - Rt));
      const double target = std::ceil(forecast);
      if (target > static_cast<double>(records.back().t)) {
        audit.inconclusive("adaptive_forecast");
        continue;
      }
      const auto idx = static_cast<std::size_t>(target) - first_t;
      audit.le("adaptive_forecast", records[idx].t, rho - records[idx].g, options.eps);
    }
  }

  if (rule == StepRule::AdaBoost) {
    for (std::size_t k = 1; k < n; ++k) {
      const auto& prev = records[k - 1];
      const auto& cur = records[k];
      const double dG = cur.g - prev.g;
      const double dU = upsilon(cur.r) - prev.g;
      auto& c = audit.summary("progress_sign");
      if (std::abs(dG) <= options.sign_band || std::abs(dU) <= options.sign_band) continue;
      ++c.checked;
      const double agreement = dU > 0.0 ? dG : -dG;
      c.worst_slack = std::min(c.worst_slack, agreement);
      if ((dG > 0.0) != (dU > 0.0)) audit.fail(c, cur.t, dG, dU);
    }
  }
  return rep;
}

}  // namespace mboost
