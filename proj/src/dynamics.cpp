#include "mboost/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mboost {

std::optional<CycleReport> detect_cycle(std::span<const WeightDist> trace, double tol,
                                        std::size_t t_max) {
  if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  if (trace.size() < 2 * t_max) {
    throw std::invalid_argument("trace length " + std::to_string(trace.size()) +
                                " is shorter than 2 * t_max");
  }
  const std::size_t len = trace.size();
  for (std::size_t T = 1; T <= t_max; ++T) {
    // Walk back from the end while pairs (t, t + T) agree.
    std::size_t start = len - T;
    while (start > 0 && trace[start - 1].max_abs_diff(trace[start - 1 + T]) <= tol) --start;
    const std::size_t pairs = len - T - start;
    if (pairs >= 2 * T) {
      CycleReport report;
      report.period = T;
      report.start = start;
      return report;
    }
  }
  return std::nullopt;
}

CycleReport cycle_diagnostics(const GameMatrix& M, std::span<const IterationRecord> records,
                              std::span<const WeightDist> weights, CycleReport report, double tol,
                              double sv_tol, double edge_tol) {
  const std::size_t T = report.period;
  if (T == 0) throw std::invalid_argument("cycle report has no period");
  if (weights.size() != records.size() + 1) {
    throw std::invalid_argument("weights must hold one more entry than records");
  }
  if (records.size() < T) throw std::invalid_argument("trace shorter than the period");
  const std::size_t first = records.size() - T;
  if (first < report.start) {
    throw std::runtime_error("final window starts before the detected cycle");
  }
  if (weights[first].max_abs_diff(weights[records.size()]) > tol) {
    throw std::runtime_error("final window does not repeat with period " + std::to_string(T));
  }

  const std::size_t m = M.rows();
  report.cycle_edges.clear();
  for (std::size_t k = first; k < records.size(); ++k) report.cycle_edges.push_back(records[k].r);
  const auto [lo, hi] = std::minmax_element(report.cycle_edges.begin(), report.cycle_edges.end());
  report.equal_edges = *hi - *lo <= edge_tol;

  report.support_set.clear();
  report.tau.clear();
  report.condition_residuals.clear();
  report.max_residual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    bool support = true;
    for (std::size_t k = first; k < records.size() && support; ++k) support = weights[k][i] > sv_tol;
    if (!support) continue;
    report.support_set.push_back(i);
    int tau = 0;
    double product = 1.0;
    for (std::size_t k = first; k < records.size(); ++k) {
      const auto j = static_cast<std::size_t>(records[k].j);
      const int v = M(i, j);
      tau += v > 0 ? 1 : 0;
      product *= 1.0 + v * records[k].r;
    }
    report.tau[i] = tau;
    const double residual = std::abs(product - 1.0);
    report.condition_residuals[i] = residual;
    report.max_residual = std::max(report.max_residual, residual);
  }

  report.tau_uniform = !report.tau.empty();
  report.tau_in_range = !report.tau.empty();
  for (const auto& [i, tau] : report.tau) {
    report.tau_uniform = report.tau_uniform && tau == report.tau.begin()->second;
    report.tau_in_range = report.tau_in_range && tau >= 1 && tau <= static_cast<int>(T);
  }
  return report;
}

MonotonicityScan smooth_margin_monotonicity_scan(std::span<const double> g, std::size_t period,
                                                 std::optional<double> target, double band) {
  MonotonicityScan scan;
  std::vector<bool> down(g.size() > 0 ? g.size() - 1 : 0, false);
  for (std::size_t t = 0; t + 1 < g.size(); ++t) {
    const double diff = g[t + 1] - g[t];
    if (diff > band) ++scan.increases;
    if (diff < -band) {
      ++scan.decreases;
      down[t] = true;
    }
  }
  if (period > 0) {
    for (std::size_t w = 0; w + period <= down.size(); w += period) {
      scan.decreases_per_window.push_back(static_cast<std::size_t>(
          std::count(down.begin() + static_cast<std::ptrdiff_t>(w),
                     down.begin() + static_cast<std::ptrdiff_t>(w + period), true)));
    }
    scan.decrease_every_window =
        !scan.decreases_per_window.empty() &&
        std::all_of(scan.decreases_per_window.begin(), scan.decreases_per_window.end(),
                    [](std::size_t c) { return c > 0; });
  }
  if (target) {
    scan.residual.reserve(g.size());
    for (double v : g) scan.residual.push_back(std::abs(v - *target));
    const std::size_t half = scan.residual.size() / 2;
    bool ok = scan.residual.size() >= 4;
    for (std::size_t t = half; ok && t + 1 < scan.residual.size(); ++t) {
      ok = scan.residual[t + 1] <= scan.residual[t] + band;
    }
    scan.residual_eventually_decreasing = ok && scan.residual.back() < scan.residual[half];
  }
  return scan;
}

std::vector<RecursionState> scripted_recursion(double rho, double g0, double s0, std::size_t steps) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (!(g0 >= 0.0 && g0 < rho)) throw std::invalid_argument("g0 must lie in [0, rho)");
  if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be positive");
  std::vector<RecursionState> out;
  out.reserve(steps + 1);
  RecursionState st{0, s0, g0, rho - g0, 0.0};
  out.push_back(st);
  const double atanh_rho = std::atanh(rho);
  const double log_rho = std::log1p(-rho * rho);
  for (std::size_t t = 1; t <= steps; ++t) {
    const double alpha = atanh_rho - std::atanh(st.g);
    const double sg = st.s * st.g + 0.5 * (std::log1p(-st.g * st.g) - log_rho);
    st.t = t;
    st.s += alpha;
    st.g = sg / st.s;
    st.x = rho - st.g;
    st.alpha = alpha;
    out.push_back(st);
  }
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(std::span<const std::pair<double, double>> pts) {
  const auto n = static_cast<double>(pts.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace

DecayFit decay_exponent(std::span<const std::pair<double, double>> trace, double t_lo, double t_hi) {
  if (!(t_lo > 0.0)) throw std::invalid_argument("t_lo must be positive");
  if (!(t_hi >= 10.0 * t_lo)) throw std::invalid_argument("window must span a factor of 10");
  std::vector<std::pair<double, double>> window;
  for (const auto& [t, x] : trace) {
    if (t < t_lo || t > t_hi) continue;
    if (!(x > 0.0)) throw std::invalid_argument("decay_exponent needs x > 0 over the window");
    window.emplace_back(t, x);
  }
  if (window.size() < 4) throw std::invalid_argument("too few points in the fit window");

  constexpr std::size_t kMaxPoints = 200;
  std::vector<std::pair<double, double>> sample;
  if (window.size() <= kMaxPoints) {
    sample = window;
  } else {
    const double a = std::log(window.front().first);
    const double b = std::log(window.back().first);
    std::size_t last = window.size();
    for (std::size_t k = 0; k < kMaxPoints; ++k) {
      const double target = std::exp(a + (b - a) * static_cast<double>(k) / (kMaxPoints - 1));
      auto it = std::lower_bound(window.begin(), window.end(), target,
                                 [](const auto& p, double v) { return p.first < v; });
      if (it == window.end()) it = std::prev(window.end());
      const auto idx = static_cast<std::size_t>(it - window.begin());
      if (idx != last) sample.push_back(window[idx]);
      last = idx;
    }
  }
  for (auto& [t, x] : sample) {
    t = std::log(t);
    x = std::log(x);
  }
  const auto full = least_squares(sample);
  const std::size_t half = sample.size() / 2;
  const auto early = least_squares(std::span(sample).first(half));
  const auto late = least_squares(std::span(sample).subspan(half));

  DecayFit fit;
  fit.slope = full.slope;
  fit.intercept = full.intercept;
  fit.points = sample.size();
  fit.early_slope = early.slope;
  fit.late_slope = late.slope;
  fit.power_law = std::abs(early.slope - late.slope) <= 0.2 * std::abs(full.slope) + 1e-9;
  return fit;
}

}  // namespace mboost
