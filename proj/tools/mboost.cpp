// mboost: command-line driver for the boosting runs, the margin LP, cycle
// detection, the recursion simulator, the experiment suites and the audits.
//
// Exit codes: 0 success, 1 usage or validation error, 2 audit violation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mboost/boosters.hpp"
#include "mboost/dynamics.hpp"
#include "mboost/harness.hpp"
#include "mboost/margin_lp.hpp"
#include "mboost/trace_io.hpp"

using namespace mboost;

namespace {

constexpr int kUsage = 1;
constexpr int kViolation = 2;

struct Source {
  std::string matrix;
  std::string gen;
  std::size_t m = 60;
  std::size_t dim = 80;
  std::size_t k_signal = 11;
  std::size_t n_test = 0;
  std::uint64_t seed = 1;
};

void add_source(CLI::App* cmd, Source& src, bool with_test_points = false) {
  auto* mat = cmd->add_option("--matrix", src.matrix, "matrix file (rows of +1/-1)")->check(CLI::ExistingFile);
  auto* gen = cmd->add_option("--gen", src.gen, "generator for the matrix")->check(CLI::IsMember({"hypercube"}));
  mat->excludes(gen);
  cmd->add_option("--m", src.m, "training points (or examples for the bounded-edge learner)")
      ->capture_default_str();
  cmd->add_option("--dim", src.dim, "hypercube dimension")->capture_default_str();
  cmd->add_option("--ksignal", src.k_signal, "signal coordinates (odd)")->capture_default_str();
  cmd->add_option("--seed", src.seed, "generator seed")->capture_default_str();
  if (with_test_points) cmd->add_option("--n-test", src.n_test, "test points")->capture_default_str();
}

HypercubeInstance make_hypercube(const Source& src) {
  return gen_hypercube(src.m, src.dim, src.k_signal, src.n_test, src.seed);
}

GameMatrix load_matrix(const Source& src) {
  if (!src.matrix.empty()) return read_matrix_file(src.matrix);
  if (src.gen == "hypercube") return make_hypercube(src).M;
  throw std::invalid_argument("need --matrix PATH or --gen hypercube");
}

std::string fmt(double v) { return format_double(v); }

// rho from the LP, refusing to go on with an uncertified solution.
double certified_rho(const GameMatrix& M) {
  const auto sol = max_margin(M);
  if (!sol.certified()) {
    throw std::runtime_error("LP duality gap " + fmt(sol.gap) + " exceeds 1e-9");
  }
  return sol.rho;
}

void maybe_write_trace(const std::string& path, const std::string& format,
                       const std::vector<IterationRecord>& records) {
  if (path.empty()) return;
  write_trace_file(path, records, parse_trace_format(format));
}

void print_checks(const BoundReport& rep) {
  std::printf("rho %s  t_tilde %s  warmup_bound %s  bound %s  first_hit %s\n", fmt(rep.rho).c_str(),
              rep.t_tilde ? std::to_string(*rep.t_tilde).c_str() : "none", fmt(rep.warmup_bound).c_str(),
              fmt(rep.bound_T52).c_str(), rep.first_hit ? std::to_string(*rep.first_hit).c_str() : "none");
  for (const auto& c : rep.checks) {
    const char* status = c.violations > 0 ? "FAIL" : (c.inconclusive && c.checked == 0 ? "n/a" : "pass");
    std::printf("  %-26s checked %-8zu violations %-6zu worst_slack %-14s %s%s\n", c.name.c_str(), c.checked,
                c.violations, fmt(c.worst_slack).c_str(), status, c.inconclusive ? " (inconclusive)" : "");
  }
  for (const auto& v : rep.violations) {
    std::printf("  violation %s at t=%zu: %s > %s\n", v.check.c_str(), v.t, fmt(v.lhs).c_str(),
                fmt(v.rhs).c_str());
  }
}

// ---- run ----

struct RunOpts {
  Source src;
  std::string rule = "adaboost";
  std::string learner = "optimal";
  double goal = 0.5;
  double rho_bar = 0.3;
  double sigma = 0.1;
  double phi = 0.0;
  double edge = 0.0;
  std::string script;
  std::string script_mode = "cyclic";
  double s0 = 0.0;
  double g0 = 0.0;
  std::size_t iters = 1000;
  std::string trace;
  std::string format = "csv";
  bool no_switch = false;
  std::optional<double> stop_eps;
  std::optional<double> stop_g_eps;
  bool compare = false;
  std::string compare_out;
};

// Restarts both coordinate ascent step rules from each recorded state after
// G turns positive; the line search step should never exceed the
// approximate one.
int compare_steps(const std::vector<IterationRecord>& records, const std::string& out_path) {
  std::ofstream out;
  if (!out_path.empty()) {
    out.open(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "t,r,g,alpha_alg1,alpha_alg2\n";
  }
  std::size_t compared = 0;
  std::size_t bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& prev = records[k - 1];
    const auto& cur = records[k];
    if (!(prev.g >= 0.0 && prev.s > 0.0 && cur.r > prev.g && cur.r < 1.0)) continue;
    const double a1 = alg1_line_search(prev.s, prev.g, gamma_of(cur.r));
    const double a2 = alg2_step(cur.r, prev.g);
    ++compared;
    worst = std::max(worst, a1 - a2);
    if (a1 > a2 + 1e-12) ++bad;
    if (out) out << cur.t << ',' << fmt(cur.r) << ',' << fmt(prev.g) << ',' << fmt(a1) << ',' << fmt(a2) << '\n';
  }
  std::printf("compare: %zu states, alg1 step <= alg2 step in %zu, max(alg1 - alg2) %s\n", compared,
              compared - bad, compared ? fmt(worst).c_str() : "n/a");
  return bad > 0 ? kViolation : 0;
}

int cmd_run(const RunOpts& o) {
  RunConfig cfg;
  cfg.rule = parse_step_rule(o.rule);
  cfg.max_iters = o.iters;
  cfg.g_switch = !o.no_switch;
  cfg.stop_eps = o.stop_eps;
  cfg.stop_g_eps = o.stop_g_eps;
  cfg.seed = o.src.seed;

  RunResult res;
  std::optional<double> rho;
  std::string rho_label = "rho";
  if (o.learner == "optimal" || o.learner == "goal-edge") {
    const auto M = load_matrix(o.src);
    rho = certified_rho(M);
    cfg.rho = rho;
    if (o.learner == "goal-edge") {
      // Values within the LP certificate tolerance of zero count as nonseparable.
      if (!(*rho > 1e-9)) {
        throw std::invalid_argument("goal-edge learner needs a separable matrix (rho = " + fmt(*rho) + ")");
      }
      if (!(o.goal > *rho && o.goal < 1.0)) {
        throw std::invalid_argument("--goal must lie in (rho, 1) = (" + fmt(*rho) + ", 1)");
      }
      cfg.learner = GoalEdgeLearner{o.goal};
    }
    res = run(M, cfg);
  } else if (o.learner == "bounded-edge") {
    cfg.learner = BoundedEdgeParams::make(o.rho_bar, o.sigma, o.phi, o.src.m);
    // rho_bar bounds the value of every pool, so it stands in for rho.
    rho = o.rho_bar;
    rho_label = "rho_bar";
    res = run_implicit(cfg);
  } else {
    EdgeScript script = EdgeScript::constant(0.5);
    if (!o.script.empty()) {
      const auto mode = o.script_mode == "constant" ? EdgeScript::Mode::Constant
                        : o.script_mode == "finite" ? EdgeScript::Mode::Finite
                                                    : EdgeScript::Mode::Cyclic;
      script = EdgeScript::load(o.script, mode);
    } else if (o.edge > 0.0) {
      script = EdgeScript::constant(o.edge);
    } else {
      throw std::invalid_argument("script learner needs --edge R or --script PATH");
    }
    const auto start = o.s0 > 0.0 ? ScriptedStart::at(o.s0, o.g0) : ScriptedStart::origin(o.src.m);
    res = run_scripted(script, cfg, start);
  }

  maybe_write_trace(o.trace, o.format, res.records);
  const auto& last = res.records.back();
  std::printf("steps %zu  s %s  g %s  mu %s\n", res.records.size(), fmt(last.s).c_str(), fmt(last.g).c_str(),
              fmt(last.mu).c_str());
  if (rho && !std::isnan(last.mu)) {
    std::printf("%s %s  %s - mu %s\n", rho_label.c_str(), fmt(*rho).c_str(), rho_label.c_str(),
                fmt(*rho - last.mu).c_str());
  }
  if (res.stopped_early) std::printf("stopped early\n");
  return o.compare ? compare_steps(res.records, o.compare_out) : 0;
}

// ---- lp ----

int cmd_lp(const Source& src, std::size_t grid) {
  const auto M = load_matrix(src);
  const auto sol = max_margin(M);
  std::printf("rho %s\ngap %s\npivots %zu\ncertified %s\n", fmt(sol.rho).c_str(), fmt(sol.gap).c_str(), sol.pivots,
              sol.certified() ? "yes" : "no");
  std::printf("lambda");
  for (double v : sol.lambda_star) std::printf(" %s", fmt(v).c_str());
  std::printf("\nd");
  for (double v : sol.d_star) std::printf(" %s", fmt(v).c_str());
  std::printf("\n");
  if (grid > 0) std::printf("grid %s\n", fmt(brute_force_value(M, grid)).c_str());
  return sol.certified() ? 0 : kViolation;
}

// ---- cycle ----

struct CycleOpts {
  Source src;
  std::size_t iters = 3000;
  double tol = 1e-9;
  std::size_t t_max = 50;
  double sv_tol = 1e-7;
  double edge_tol = 1e-7;
  std::string trace;
  std::string format = "csv";
};

int cmd_cycle(const CycleOpts& o) {
  const auto M = load_matrix(o.src);
  RunConfig cfg;
  cfg.max_iters = o.iters;
  cfg.keep_weights = true;
  const auto res = run(M, cfg);
  maybe_write_trace(o.trace, o.format, res.records);
  const auto found = detect_cycle(res.weights, o.tol, o.t_max);
  if (!found) {
    std::printf("no cycle of period <= %zu at tol %s\n", o.t_max, fmt(o.tol).c_str());
    return 0;
  }
  const auto rep = cycle_diagnostics(res.columns, res.records, res.weights, *found, o.tol, o.sv_tol, o.edge_tol);
  std::printf("period %zu  start %zu\nedges", rep.period, rep.start);
  for (double r : rep.cycle_edges) std::printf(" %s", fmt(r).c_str());
  std::printf("\nequal_edges %s\nsupport", rep.equal_edges ? "yes" : "no");
  for (auto i : rep.support_set) std::printf(" %zu", i);
  std::printf("\n");
  for (const auto& [i, tau] : rep.tau) {
    std::printf("  example %zu  tau %d  residual %s\n", i, tau, fmt(rep.condition_residuals.at(i)).c_str());
  }
  std::printf("tau_uniform %s  tau_in_range %s  max_residual %s\n", rep.tau_uniform ? "yes" : "no",
              rep.tau_in_range ? "yes" : "no", fmt(rep.max_residual).c_str());

  std::vector<double> g;
  for (std::size_t k = rep.start; k < res.records.size(); ++k) g.push_back(res.records[k].g);
  std::optional<double> target;
  if (rep.equal_edges) target = upsilon(rep.cycle_edges.front());
  const auto scan = smooth_margin_monotonicity_scan(g, rep.period, target);
  std::printf("g increases %zu  decreases %zu  decrease_every_period %s\n", scan.increases, scan.decreases,
              scan.decrease_every_window ? "yes" : "no");
  if (target) {
    std::printf("|g - Upsilon(r)| eventually decreasing %s\n", scan.residual_eventually_decreasing ? "yes" : "no");
  }
  return 0;
}

// ---- simulate ----

struct SimOpts {
  double rho = 0.5;
  double g0 = 0.1;
  double s0 = 1.0;
  std::size_t steps = 1000000;
  std::string out;
  std::size_t every = 1;
  double fit_lo = 1e3;
  double fit_hi = 0.0;
};

int cmd_simulate(const SimOpts& o) {
  if (!(o.g0 < o.rho)) throw std::invalid_argument("--g0 must be below --rho");
  if (o.every == 0) throw std::invalid_argument("--every must be positive");
  const auto states = scripted_recursion(o.rho, o.g0, o.s0, o.steps);
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot write " + o.out);
    out << "t,s,g,x\n";
    for (const auto& st : states) {
      if (st.t % o.every != 0 && st.t != o.steps) continue;
      out << st.t << ',' << fmt(st.s) << ',' << fmt(st.g) << ',' << fmt(st.x) << '\n';
    }
  }
  const auto& last = states.back();
  std::printf("t %zu  s %s  g %s  x %s\n", last.t, fmt(last.s).c_str(), fmt(last.g).c_str(), fmt(last.x).c_str());
  const double hi = o.fit_hi > 0.0 ? o.fit_hi : static_cast<double>(o.steps);
  if (hi >= 10.0 * o.fit_lo && hi <= static_cast<double>(o.steps)) {
    std::vector<std::pair<double, double>> trace;
    trace.reserve(states.size());
    for (const auto& st : states) {
      if (st.t > 0) trace.emplace_back(static_cast<double>(st.t), st.x);
    }
    const auto fit = decay_exponent(trace, o.fit_lo, hi);
    std::printf("exponent %s over [%s, %s] (%zu points, halves %s / %s, power law %s)\n", fmt(fit.slope).c_str(),
                fmt(o.fit_lo).c_str(), fmt(hi).c_str(), fit.points, fmt(fit.early_slope).c_str(),
                fmt(fit.late_slope).c_str(), fit.power_law ? "yes" : "no");
  } else {
    std::printf("exponent n/a (fit window needs t_hi >= 10 t_lo within the run)\n");
  }
  return 0;
}

// ---- suite ----

struct SuiteOpts {
  std::string kind;
  Source src;
  double rho_bar = 0.3;
  double sigma = 0.1;
  double phi = 0.0;
  std::size_t iters = 0;
  double delta = 0.01;
  double tail_fraction = 0.1;
  std::size_t lp_subset = 200;
  std::size_t goals = 8;
  std::size_t tail = 250;
  double margin_tol = 0.02;
  std::string out_dir;
  std::string format = "csv";
};

std::string trace_path(const SuiteOpts& o, const std::string& stem) {
  return (std::filesystem::path(o.out_dir) / (stem + (o.format == "csv" ? ".csv" : ".jsonl"))).string();
}

int suite_bounded(const SuiteOpts& o) {
  const auto rep = run_bounded_edge_suite(o.rho_bar, o.sigma, o.phi, o.src.m, o.iters ? o.iters : 20000, o.delta,
                                          o.tail_fraction, o.lp_subset);
  if (!o.out_dir.empty()) maybe_write_trace(trace_path(o, "bounded_edge"), o.format, rep.run.records);
  std::printf("bounded-edge: rho_bar %s sigma %s phi %s m %zu cap %zu\n", fmt(rep.params.rho_bar()).c_str(),
              fmt(rep.params.sigma()).c_str(), fmt(rep.params.phi()).c_str(), rep.params.m(), rep.params.cap());
  std::printf("  tail g in [%s, %s], bracket [%s, %s] +- %s: %s\n", fmt(rep.tail_g_min).c_str(),
              fmt(rep.tail_g_max).c_str(), fmt(rep.upsilon_lo).c_str(), fmt(rep.upsilon_hi).c_str(),
              fmt(rep.delta).c_str(), rep.bracket_ok ? "pass" : "FAIL");
  std::printf("  edges in [rho_bar, rho_bar + sigma]: %zu violations, worst excursion %s: %s\n", rep.edge_violations,
              fmt(rep.worst_edge_excursion).c_str(), rep.edge_violations == 0 ? "pass" : "FAIL");
  std::printf("  weight ratio K_t = phi: %zu violations, worst ratio %s: %s\n", rep.ratio_violations,
              fmt(rep.worst_ratio).c_str(), rep.ratio_violations == 0 ? "pass" : "FAIL");
  std::printf("  pool columns over cap: %zu: %s\n", rep.cap_violations, rep.cap_violations == 0 ? "pass" : "FAIL");
  std::printf("  LP on first %zu pool columns: %s <= rho_bar: %s\n", rep.subset_cols, fmt(rep.subset_rho).c_str(),
              rep.rho_consistent ? "pass" : "FAIL");
  return rep.passed() ? 0 : kViolation;
}

int suite_goal(const SuiteOpts& o) {
  Source src = o.src;
  if (src.n_test == 0) src.n_test = 2000;
  const auto inst = make_hypercube(src);
  const double rho = certified_rho(inst.M);
  if (!(rho > 0.0)) throw std::invalid_argument("generated dataset is not separable");
  // The largest edge at uniform weights is the natural top of the goal range.
  const auto r0 = optimal_select(inst.M, WeightDist::uniform(inst.M.rows())).r;
  const auto goals = equally_spaced_goals(rho, r0, o.goals);
  const auto res = run_goal_edge_suite(inst, goals, o.iters ? o.iters : 3000, rho, true, o.tail);
  std::printf("goal-edge: rho %s, goals in (%s, %s)\n", fmt(rho).c_str(), fmt(rho).c_str(), fmt(r0).c_str());
  std::printf("  %-10s %-10s %-10s %-12s %-10s %-10s\n", "goal", "edge", "margin", "Upsilon", "gap", "test_err");
  bool ok = true;
  for (std::size_t k = 0; k < res.trials.size(); ++k) {
    const auto& tr = res.trials[k];
    const bool pass = tr.margin_gap <= o.margin_tol;
    ok = ok && pass;
    std::printf("  %-10s %-10.6f %-10.6f %-12.6f %-10.2e %-10.4f %s\n",
                tr.goal ? fmt(*tr.goal).substr(0, 8).c_str() : "optimal", tr.mean_edge, tr.final_margin,
                tr.upsilon_mean_edge, tr.margin_gap, tr.test_error, pass ? "pass" : "FAIL");
    if (!o.out_dir.empty()) maybe_write_trace(trace_path(o, "goal_trial_" + std::to_string(k)), o.format, tr.records);
  }
  const bool trend = res.spearman <= 0.0;
  std::printf("  spearman(margin, test error) %s <= 0: %s\n", fmt(res.spearman).c_str(), trend ? "pass" : "FAIL");
  return ok && trend ? 0 : kViolation;
}

int cmd_suite(const SuiteOpts& o) {
  if (!o.out_dir.empty()) std::filesystem::create_directories(o.out_dir);
  return o.kind == "bounded" ? suite_bounded(o) : suite_goal(o);
}

// ---- audit ----

struct AuditCmd {
  Source src;
  std::string rule = "alg2";
  std::size_t iters = 2000;
  std::string trace_in;
  std::string format = "csv";
  double rho = 0.0;
  AuditOptions opts;
};

int cmd_audit(AuditCmd o) {
  const StepRule rule = parse_step_rule(o.rule);
  std::vector<IterationRecord> records;
  double rho = o.rho;
  std::size_t m = 0;
  if (!o.trace_in.empty()) {
    if (!(rho > 0.0)) throw std::invalid_argument("auditing a trace file needs --rho");
    records = read_trace_file(o.trace_in, parse_trace_format(o.format));
    m = o.src.m;
  } else {
    const auto M = load_matrix(o.src);
    rho = certified_rho(M);
    if (!(rho > 0.0)) throw std::invalid_argument("audits need a separable matrix (rho = " + fmt(rho) + ")");
    RunConfig cfg;
    cfg.rule = rule;
    cfg.max_iters = o.iters;
    records = run(M, cfg).records;
    m = M.rows();
  }
  if (records.empty()) throw std::invalid_argument("empty trace");
  const auto rep = audit_bounds(records, rho, rule, m, o.opts);
  print_checks(rep);
  std::printf("%s\n", rep.passed() ? "PASS" : "FAIL");
  return rep.passed() ? 0 : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boosting dynamics and margin tools"};
  app.require_subcommand(1);

  RunOpts run_opts;
  auto* run_cmd = app.add_subcommand("run", "run a booster and write its trace");
  add_source(run_cmd, run_opts.src);
  run_cmd->add_option("--rule", run_opts.rule)->check(CLI::IsMember({"adaboost", "alg1", "alg2", "arcgv"}))
      ->capture_default_str();
  run_cmd->add_option("--learner", run_opts.learner)
      ->check(CLI::IsMember({"optimal", "goal-edge", "bounded-edge", "script"}))
      ->capture_default_str();
  run_cmd->add_option("--goal", run_opts.goal, "target edge for goal-edge")->capture_default_str();
  run_cmd->add_option("--rho-bar", run_opts.rho_bar, "bounded-edge lower edge")->capture_default_str();
  run_cmd->add_option("--sigma", run_opts.sigma, "bounded-edge edge window")->capture_default_str();
  run_cmd->add_option("--phi", run_opts.phi, "bounded-edge weight ratio (0 = smallest admissible)")
      ->capture_default_str();
  run_cmd->add_option("--edge", run_opts.edge, "constant scripted edge");
  run_cmd->add_option("--script", run_opts.script, "file of scripted edges")->check(CLI::ExistingFile);
  run_cmd->add_option("--script-mode", run_opts.script_mode)
      ->check(CLI::IsMember({"constant", "finite", "cyclic"}))
      ->capture_default_str();
  run_cmd->add_option("--s0", run_opts.s0, "scripted start: s (0 = origin)");
  run_cmd->add_option("--g0", run_opts.g0, "scripted start: smooth margin");
  run_cmd->add_option("--iters", run_opts.iters)->check(CLI::PositiveNumber)->capture_default_str();
  run_cmd->add_option("--trace", run_opts.trace, "trace output path");
  run_cmd->add_option("--format", run_opts.format)->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  run_cmd->add_flag("--no-switch", run_opts.no_switch, "skip the AdaBoost warm-up until G > 0");
  run_cmd->add_option("--stop-eps", run_opts.stop_eps, "stop once rho - best mu <= eps");
  run_cmd->add_option("--stop-g-eps", run_opts.stop_g_eps, "stop once rho - g <= eps");
  run_cmd->add_flag("--compare", run_opts.compare, "compare line search and approximate steps on the trace");
  run_cmd->add_option("--compare-out", run_opts.compare_out, "CSV of the step comparison");

  Source lp_src;
  std::size_t grid = 0;
  auto* lp_cmd = app.add_subcommand("lp", "maximum margin by linear programming");
  add_source(lp_cmd, lp_src);
  lp_cmd->add_option("--brute", grid, "also evaluate a barycentric grid of this resolution (n <= 4)");

  CycleOpts cyc;
  auto* cycle_cmd = app.add_subcommand("cycle", "run AdaBoost and look for a cycle in the weights");
  add_source(cycle_cmd, cyc.src);
  cycle_cmd->add_option("--iters", cyc.iters)->check(CLI::PositiveNumber)->capture_default_str();
  cycle_cmd->add_option("--tol", cyc.tol)->capture_default_str();
  cycle_cmd->add_option("--tmax", cyc.t_max, "largest period tried")->capture_default_str();
  cycle_cmd->add_option("--sv-tol", cyc.sv_tol)->capture_default_str();
  cycle_cmd->add_option("--edge-tol", cyc.edge_tol)->capture_default_str();
  cycle_cmd->add_option("--trace", cyc.trace);
  cycle_cmd->add_option("--format", cyc.format)->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();

  SimOpts sim;
  auto* sim_cmd = app.add_subcommand("simulate", "iterate the constant-edge recursion");
  sim_cmd->add_option("--rho", sim.rho)->capture_default_str();
  sim_cmd->add_option("--g0", sim.g0)->capture_default_str();
  sim_cmd->add_option("--s0", sim.s0)->capture_default_str();
  sim_cmd->add_option("--steps", sim.steps)->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "CSV of t,s,g,x");
  sim_cmd->add_option("--every", sim.every, "write every k-th row")->capture_default_str();
  sim_cmd->add_option("--fit-lo", sim.fit_lo)->capture_default_str();
  sim_cmd->add_option("--fit-hi", sim.fit_hi, "defaults to --steps");

  SuiteOpts suite;
  auto* suite_cmd = app.add_subcommand("suite", "experiment suites");
  suite_cmd->add_option("--kind", suite.kind)->required()->check(CLI::IsMember({"bounded", "goal"}));
  add_source(suite_cmd, suite.src, true);
  suite_cmd->add_option("--rho-bar", suite.rho_bar)->capture_default_str();
  suite_cmd->add_option("--sigma", suite.sigma)->capture_default_str();
  suite_cmd->add_option("--phi", suite.phi)->capture_default_str();
  suite_cmd->add_option("--iters", suite.iters, "default 20000 (bounded) or 3000 (goal)");
  suite_cmd->add_option("--delta", suite.delta)->capture_default_str();
  suite_cmd->add_option("--tail-fraction", suite.tail_fraction)->capture_default_str();
  suite_cmd->add_option("--lp-subset", suite.lp_subset)->capture_default_str();
  suite_cmd->add_option("--goals", suite.goals)->capture_default_str();
  suite_cmd->add_option("--tail", suite.tail, "iterations averaged for the realized edge")->capture_default_str();
  suite_cmd->add_option("--margin-tol", suite.margin_tol)->capture_default_str();
  suite_cmd->add_option("--out-dir", suite.out_dir, "directory for per-run traces");
  suite_cmd->add_option("--format", suite.format)->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();

  AuditCmd aud;
  auto* audit_cmd = app.add_subcommand("audit", "check a run against the convergence bounds");
  add_source(audit_cmd, aud.src);
  audit_cmd->add_option("--rule", aud.rule)->check(CLI::IsMember({"adaboost", "alg1", "alg2", "arcgv"}))
      ->capture_default_str();
  audit_cmd->add_option("--iters", aud.iters)->check(CLI::PositiveNumber)->capture_default_str();
  audit_cmd->add_option("--trace-in", aud.trace_in, "audit an existing trace instead of running")
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--format", aud.format)->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  audit_cmd->add_option("--rho", aud.rho, "maximum margin (with --trace-in)");
  audit_cmd->add_option("--eps", aud.opts.eps)->capture_default_str();
  audit_cmd->add_option("--slack", aud.opts.slack)->capture_default_str();
  audit_cmd->add_option("--sign-band", aud.opts.sign_band)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*lp_cmd) return cmd_lp(lp_src, grid);
    if (*cycle_cmd) return cmd_cycle(cyc);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*suite_cmd) return cmd_suite(suite);
    if (*audit_cmd) return cmd_audit(aud);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
