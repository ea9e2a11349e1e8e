#include "mboost/weak_learners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mboost {

namespace {

constexpr double kPrefixSlack = 1e-12;

bool integral(double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

bool size_ok(double rho_bar, double sigma, double phi, std::size_t m) {
  const auto md = static_cast<double>(m);
  return md >= 2.0 * phi / sigma - 1e-9 && integral(md * (rho_bar + 1.0) / 2.0);
}

}  // namespace

double BoundedEdgeParams::min_phi(double rho_bar, double sigma) {
  return (1.0 + rho_bar + sigma) / (1.0 - rho_bar - sigma);
}

std::size_t BoundedEdgeParams::smallest_admissible_m(double rho_bar, double sigma, double phi) {
  const auto start = static_cast<std::size_t>(std::max(2.0, std::ceil(2.0 * phi / sigma - 1e-9)));
  for (std::size_t m = start; m < 10'000'000; ++m) {
    if (size_ok(rho_bar, sigma, phi, m)) return m;
  }
  return 0;
}

BoundedEdgeParams BoundedEdgeParams::make(double rho_bar, double sigma, double phi, std::size_t m) {
  if (!(rho_bar > 0.0 && rho_bar < 1.0)) throw std::invalid_argument("rho_bar must lie in (0, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(rho_bar + sigma < 1.0)) throw std::invalid_argument("rho_bar + sigma must be below 1");
  const double phi_min = min_phi(rho_bar, sigma);
  if (phi <= 0.0) phi = phi_min;
  if (phi < phi_min * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "phi = " << phi << " is below (1 + rho_bar + sigma) / (1 - rho_bar - sigma) = "
        << phi_min;
    throw std::invalid_argument(msg.str());
  }
  if (!size_ok(rho_bar, sigma, phi, m)) {
    std::ostringstream msg;
    msg << "m = " << m << " is not admissible: need m >= 2 phi / sigma = " << 2.0 * phi / sigma
        << " and m (rho_bar + 1) / 2 integral";
    if (const auto hint = smallest_admissible_m(rho_bar, sigma, phi)) {
      msg << "; smallest admissible m is " << hint;
    }
    throw std::invalid_argument(msg.str());
  }
  BoundedEdgeParams p;
  p.rho_bar_ = rho_bar;
  p.sigma_ = sigma;
  p.phi_ = phi;
  p.m_ = m;
  p.cap_ = static_cast<std::size_t>(std::llround(static_cast<double>(m) * (rho_bar + 1.0) / 2.0));
  return p;
}

EdgeScript EdgeScript::constant(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("scripted edges must lie in (0, 1)");
  EdgeScript s;
  s.mode_ = Mode::Constant;
  s.edges_ = {r};
  return s;
}

EdgeScript EdgeScript::finite(std::vector<double> edges) {
  if (edges.empty()) throw std::invalid_argument("empty edge script");
  for (double r : edges) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("scripted edges must lie in (0, 1)");
  }
  EdgeScript s;
  s.mode_ = Mode::Finite;
  s.edges_ = std::move(edges);
  return s;
}

EdgeScript EdgeScript::cyclic(std::vector<double> edges) {
  EdgeScript s = finite(std::move(edges));
  s.mode_ = Mode::Cyclic;
  return s;
}

EdgeScript EdgeScript::load(const std::string& path, Mode mode) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open edge script " + path);
  std::vector<double> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double r = 0.0;
    std::string rest;
    if (!(ls >> r) || (ls >> rest)) {
      throw std::invalid_argument("bad edge on line " + std::to_string(lineno) + " of " + path);
    }
    edges.push_back(r);
  }
  if (mode == Mode::Constant) {
    if (edges.size() != 1) throw std::invalid_argument("constant script needs exactly one edge");
    return constant(edges.front());
  }
  return mode == Mode::Cyclic ? cyclic(std::move(edges)) : finite(std::move(edges));
}

double EdgeScript::at(std::size_t t) const {
  switch (mode_) {
    case Mode::Constant:
      return edges_.front();
    case Mode::Cyclic:
      return edges_[t % edges_.size()];
    case Mode::Finite:
      break;
  }
  if (t >= edges_.size()) throw std::out_of_range("edge script exhausted");
  return edges_[t];
}

double scripted_select(const EdgeScript& script, std::size_t t) { return script.at(t); }

std::vector<double> all_edges(const GameMatrix& M, const WeightDist& d) {
  if (d.size() != M.rows()) throw std::invalid_argument("weight length does not match m");
  std::vector<double> out(M.cols());
  for (std::size_t j = 0; j < M.cols(); ++j) out[j] = edge(d, M.column(j));
  return out;
}

WeakSelection optimal_select(const GameMatrix& M, const WeightDist& d) {
  const auto edges = all_edges(M, d);
  std::size_t best = 0;
  for (std::size_t j = 1; j < edges.size(); ++j) {
    if (edges[j] > edges[best]) best = j;
  }
  return WeakSelection{best, edges[best]};
}

WeakSelection goal_edge_select(const GameMatrix& M, const WeightDist& d, double r_goal) {
  const auto edges = all_edges(M, d);
  std::size_t best = edges.size();
  double best_gap = 0.0;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    if (!(edges[j] > 0.0)) continue;
    const double gap = std::abs(edges[j] - r_goal);
    if (best == edges.size() || gap < best_gap) {
      best = j;
      best_gap = gap;
    }
  }
  if (best == edges.size()) {
    throw std::runtime_error("goal-edge learner found no column with positive edge");
  }
  return WeakSelection{best, edges[best]};
}

std::vector<std::size_t> descending_order(const WeightDist& d) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  return order;
}

WeakSelection bounded_edge_select(const WeightDist& d, const BoundedEdgeParams& params) {
  if (d.size() != params.m()) throw std::invalid_argument("weight length does not match params.m");
  const auto order = descending_order(d);
  double prefix = 0.0;
  std::size_t i_bar = 0;
  while (i_bar < order.size()) {
    prefix += d[order[i_bar]];
    ++i_bar;
    if (2.0 * prefix - 1.0 >= params.rho_bar() - kPrefixSlack) break;
  }
  if (i_bar > params.cap()) {
    throw std::runtime_error("bounded-edge prefix " + std::to_string(i_bar) +
                             " exceeds the column cap " + std::to_string(params.cap()));
  }
  std::vector<std::int8_t> col(d.size(), -1);
  for (std::size_t k = 0; k < i_bar; ++k) col[order[k]] = 1;
  WeakSelection sel;
  sel.r = edge(d, col);
  sel.i_bar = i_bar;
  sel.column = std::move(col);
  return sel;
}

double weight_ratio_stat(const WeightDist& d, double phi) {
  const auto [lo, hi] = std::minmax_element(d.weights().begin(), d.weights().end());
  const double ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  return std::max(ratio, phi);
}

std::vector<double> weight_map_check(std::span<const double> sorted, std::size_t i_bar, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("weight map needs 0 < r < 1");
  if (i_bar > sorted.size()) throw std::invalid_argument("prefix longer than the distribution");
  std::vector<double> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out[i] = sorted[i] / (i < i_bar ? 1.0 + r : 1.0 - r);
  }
  return out;
}

}  // namespace mboost
