#include "mboost/margin_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mboost {

namespace {

void check_column(Column col, std::size_t rows) {
  if (col.size() != rows) {
    throw std::invalid_argument("column length " + std::to_string(col.size()) +
                                " does not match m = " + std::to_string(rows));
  }
  bool all_plus = true;
  for (auto v : col) {
    if (v != 1 && v != -1) throw std::invalid_argument("matrix entries must be -1 or +1");
    all_plus = all_plus && v == 1;
  }
  if (all_plus) {
    throw std::invalid_argument("a column is all +1 (perfect weak classifier)");
  }
}

}  // namespace

GameMatrix::GameMatrix(std::size_t rows, std::size_t cols, std::vector<std::int8_t> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
  if (rows_ < 2) throw std::invalid_argument("game matrix needs m >= 2 examples");
  if (cols_ < 1) throw std::invalid_argument("game matrix needs n >= 1 columns");
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("matrix data size does not match m * n");
  }
  for (std::size_t j = 0; j < cols_; ++j) check_column(column(j), rows_);
}

GameMatrix GameMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  const std::size_t m = rows.size();
  const std::size_t n = rows.front().size();
  std::vector<std::int8_t> data(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t j = 0; j < n; ++j) {
      const int v = rows[i][j];
      if (v != 1 && v != -1) throw std::invalid_argument("matrix entries must be -1 or +1");
      data[j * m + i] = static_cast<std::int8_t>(v);
    }
  }
  return GameMatrix(m, n, std::move(data));
}

GameMatrix GameMatrix::empty_pool(std::size_t rows) {
  if (rows < 2) throw std::invalid_argument("game matrix needs m >= 2 examples");
  GameMatrix pool;
  pool.rows_ = rows;
  return pool;
}

std::size_t GameMatrix::append_column(Column col) {
  check_column(col, rows_);
  data_.insert(data_.end(), col.begin(), col.end());
  return cols_++;
}

std::vector<double> GameMatrix::multiply(std::span<const double> v) const {
  if (v.size() != cols_) throw std::invalid_argument("vector length does not match n");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double vj = v[j];
    if (vj == 0.0) continue;
    const auto col = column(j);
    for (std::size_t i = 0; i < rows_; ++i) out[i] += vj * col[i];
  }
  return out;
}

GameMatrix parse_matrix(std::istream& in) {
  long long m = 0;
  long long n = 0;
  if (!(in >> m >> n) || m < 2 || n < 1) {
    throw std::invalid_argument("matrix header must be \"m n\" with m >= 2, n >= 1");
  }
  const auto rows = static_cast<std::size_t>(m);
  const auto cols = static_cast<std::size_t>(n);
  std::vector<std::int8_t> data(rows * cols);
  std::string tok;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(in >> tok)) {
        throw std::invalid_argument("matrix file ended early at row " + std::to_string(i + 1));
      }
      std::int8_t v = 0;
      if (tok == "1" || tok == "+1") {
        v = 1;
      } else if (tok == "-1") {
        v = -1;
      } else {
        throw std::invalid_argument("invalid matrix token '" + tok + "' at row " +
                                    std::to_string(i + 1) + ", column " + std::to_string(j + 1));
      }
      data[j * rows + i] = v;
    }
  }
  if (in >> tok) throw std::invalid_argument("unexpected trailing token '" + tok + "'");
  return GameMatrix(rows, cols, std::move(data));
}

GameMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file " + path);
  return parse_matrix(in);
}

void write_matrix(std::ostream& out, const GameMatrix& M) {
  out << M.rows() << ' ' << M.cols() << '\n';
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << M(i, j);
    }
    out << '\n';
  }
}

WeightDist::WeightDist(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("empty weight distribution");
  double total = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("weights must sum to 1");
  }
}

WeightDist WeightDist::uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("empty weight distribution");
  return WeightDist(std::vector<double>(m, 1.0 / static_cast<double>(m)), Unchecked{});
}

double WeightDist::max_abs_diff(const WeightDist& other) const {
  if (other.size() != size()) throw std::invalid_argument("weight size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) worst = std::max(worst, std::abs(w_[i] - other.w_[i]));
  return worst;
}

ModelState ModelState::zero(const GameMatrix& M) {
  ModelState st;
  st.lambda.assign(M.cols(), 0.0);
  st.margins.assign(M.rows(), 0.0);
  return st;
}

ModelState ModelState::from_lambda(const GameMatrix& M, std::vector<double> lambda) {
  if (lambda.size() != M.cols()) throw std::invalid_argument("lambda length does not match n");
  ModelState st;
  for (double v : lambda) {
    if (!(v >= 0.0)) throw std::invalid_argument("lambda entries must be nonnegative");
    st.s += v;
  }
  st.lambda = std::move(lambda);
  st.margins = M.multiply(st.lambda);
  return st;
}

void ModelState::apply_step(const GameMatrix& M, std::size_t j, double alpha) {
  if (lambda.size() < M.cols()) lambda.resize(M.cols(), 0.0);
  lambda[j] += alpha;
  s += alpha;
  const auto col = M.column(j);
  for (std::size_t i = 0; i < margins.size(); ++i) margins[i] += alpha * col[i];
}

void ModelState::recompute_margins(const GameMatrix& M) {
  if (lambda.size() < M.cols()) lambda.resize(M.cols(), 0.0);
  margins = M.multiply(lambda);
  s = std::accumulate(lambda.begin(), lambda.end(), 0.0);
}

ModelState ModelState::scaled(double a) const {
  ModelState out = *this;
  for (auto& v : out.lambda) v *= a;
  for (auto& v : out.margins) v *= a;
  out.s *= a;
  return out;
}

double ModelState::min_margin() const {
  return *std::min_element(margins.begin(), margins.end());
}

double exp_loss_log(std::span<const double> margins) {
  // ln sum exp(-x_i) with shift by max(-x_i) = -min(x_i)
  const double lo = *std::min_element(margins.begin(), margins.end());
  double acc = 0.0;
  for (double x : margins) acc += std::exp(-(x - lo));
  return -lo + std::log(acc);
}

double exp_loss_log(const ModelState& state) { return exp_loss_log(state.margins); }

double smooth_margin(const ModelState& state) {
  if (!(state.s > 0.0)) throw std::invalid_argument("smooth margin is undefined at s = 0");
  const double lo = state.min_margin();
  double acc = 0.0;
  for (double x : state.margins) acc += std::exp(-(x - lo));
  return lo / state.s - std::log(acc) / state.s;
}

double margin(const ModelState& state) {
  if (!(state.s > 0.0)) throw std::invalid_argument("margin is undefined at s = 0");
  return state.min_margin() / state.s;
}

std::vector<std::size_t> support_vectors(const ModelState& state, double tol) {
  const double mu = margin(state);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.margins.size(); ++i) {
    if (state.margins[i] / state.s <= mu + tol) out.push_back(i);
  }
  return out;
}

double edge(const WeightDist& d, Column column) {
  if (column.size() != d.size()) throw std::invalid_argument("column length does not match m");
  double acc = 0.0;
  for (std::size_t i = 0; i < column.size(); ++i) acc += column[i] > 0 ? d[i] : -d[i];
  return acc;
}

double edge(const GameMatrix& M, const WeightDist& d, std::size_t j) {
  if (j >= M.cols()) throw std::out_of_range("column index out of range");
  return edge(d, M.column(j));
}

double upsilon(double r) {
  if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("upsilon requires 0 < r < 1");
  return -std::log1p(-r * r) / (2.0 * std::atanh(r));
}

double gamma_of(double r) {
  if (!(std::abs(r) < 1.0 - kEdgeLimit)) {
    throw std::domain_error("edge magnitude reached 1 (degenerate weak classifier)");
  }
  return std::atanh(r);
}

WeightDist update_weights(const WeightDist& d, Column column, double alpha) {
  if (column.size() != d.size()) throw std::invalid_argument("column length does not match m");
  if (!std::isfinite(alpha)) throw std::invalid_argument("step size must be finite");
  if (alpha == 0.0) return d;
  const double up = std::exp(alpha);
  const double down = std::exp(-alpha);
  std::vector<double> next(d.size());
  double z = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] = d[i] * (column[i] > 0 ? down : up);
    z += next[i];
  }
  for (auto& v : next) v /= z;
  return WeightDist(std::move(next), WeightDist::Unchecked{});
}

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

RecursionValues recursion_check(double logF, double g, double s, double gamma, double alpha) {
  if (!(s + alpha > 0.0)) throw std::invalid_argument("recursion needs s + alpha > 0");
  const double drop = log_cosh(gamma) - log_cosh(gamma - alpha);
  const double sg = s > 0.0 ? s * g : 0.0;
  return {logF - drop, (sg + drop) / (s + alpha)};
}

double shell_quadratic_form(const GameMatrix& M, const ModelState& state,
                            std::span<const double> w) {
  if (!(state.s > 0.0)) throw std::invalid_argument("shell form needs s > 0");
  if (w.size() != M.cols()) throw std::invalid_argument("direction length does not match n");
  double sum = 0.0;
  double l1 = 0.0;
  for (double v : w) {
    sum += v;
    l1 += std::abs(v);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, l1)) {
    throw std::invalid_argument("direction must have zero component sum");
  }
  const auto Mw = M.multiply(w);
  const double lo = state.min_margin();
  // All three sums share the factor exp(-lo), which cancels against F^2.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < Mw.size(); ++i) {
    const double e = std::exp(-(state.margins[i] - lo));
    a += Mw[i] * Mw[i] * e;
    b += e;
    c += Mw[i] * e;
  }
  return (c * c - a * b) / (b * b * state.s);
}

}  // namespace mboost
