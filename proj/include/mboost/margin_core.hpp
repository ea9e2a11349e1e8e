#pragma once

// Core quantities of margin-based boosting on a finite game matrix:
// exponential loss, smooth margin, minimum margin, edges, step-size
// identities and the weight update.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mboost {

using Column = std::span<const std::int8_t>;

// |r| at or above 1 - kEdgeLimit is treated as a perfect (or perfectly wrong)
// classifier.
inline constexpr double kEdgeLimit = 1e-12;

/// m x n matrix of +/-1 agreements M_ij = y_i h_j(x_i), stored column-major.
///
/// Every entry is -1 or +1, m >= 2, n >= 1 and no column is all +1.
/// Columns can be appended, which is how implicitly generated weak
/// classifiers are pooled during a run.
class GameMatrix {
 public:
  GameMatrix() = default;
  GameMatrix(std::size_t rows, std::size_t cols, std::vector<std::int8_t> column_major);

  static GameMatrix from_rows(const std::vector<std::vector<int>>& rows);
  /// Empty column pool with `rows` examples; columns are added with append_column.
  static GameMatrix empty_pool(std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  int operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
  Column column(std::size_t j) const {
    return Column(data_.data() + j * rows_, rows_);
  }

  /// Appends a validated column and returns its index.
  std::size_t append_column(Column col);

  /// Matrix-vector product M * v.
  std::vector<double> multiply(std::span<const double> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int8_t> data_;
};

/// Header "m n" followed by m rows of n entries from {-1, 1, +1}.
GameMatrix parse_matrix(std::istream& in);
GameMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const GameMatrix& M);

/// A distribution over training examples.
class WeightDist {
 public:
  explicit WeightDist(std::vector<double> weights);
  static WeightDist uniform(std::size_t m);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }

  double max_abs_diff(const WeightDist& other) const;

 private:
  struct Unchecked {};
  WeightDist(std::vector<double> weights, Unchecked) : w_(std::move(weights)) {}
  friend WeightDist update_weights(const WeightDist&, Column, double);

  std::vector<double> w_;
};

/// Coefficient vector lambda with cached l1 norm and margins M*lambda.
struct ModelState {
  std::vector<double> lambda;
  double s = 0.0;
  std::vector<double> margins;

  static ModelState zero(const GameMatrix& M);
  static ModelState from_lambda(const GameMatrix& M, std::vector<double> lambda);

  /// lambda_j += alpha, s += alpha, margins += alpha * M_{.j}.
  void apply_step(const GameMatrix& M, std::size_t j, double alpha);
  void recompute_margins(const GameMatrix& M);
  ModelState scaled(double a) const;

  double min_margin() const;
};

/// One boosting iteration. The selection fields (j, r, gamma, alpha) belong to
/// step t; the state fields (s, g, mu, logF) describe lambda after the step.
struct IterationRecord {
  std::size_t t = 0;
  std::int64_t j = 0;
  bool implicit = false;
  double r = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double s = 0.0;
  double g = 0.0;
  double mu = 0.0;
  double logF = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

/// ln F(lambda), F = sum_i exp(-(M lambda)_i), by shifted log-sum-exp.
double exp_loss_log(const ModelState& state);
double exp_loss_log(std::span<const double> margins);

/// G(lambda) = -ln F / s in the shifted form
/// mu - ln(sum_i exp(-[(M lambda)_i - min])) / s.  Requires s > 0.
double smooth_margin(const ModelState& state);

/// mu(lambda) = min_i (M lambda)_i / s.  Requires s > 0.
double margin(const ModelState& state);

/// Examples attaining the minimum margin (within `tol` in normalized margin).
std::vector<std::size_t> support_vectors(const ModelState& state, double tol = 1e-12);

/// (d^T M)_j.
double edge(const GameMatrix& M, const WeightDist& d, std::size_t j);
double edge(const WeightDist& d, Column column);

/// Upsilon(r) = -ln(1 - r^2) / ln((1 + r) / (1 - r)) on 0 < r < 1.
double upsilon(double r);

/// atanh(r); throws std::domain_error when |r| >= 1 - kEdgeLimit.
double gamma_of(double r);

/// d_i exp(-M_ij alpha) / z.
WeightDist update_weights(const WeightDist& d, Column column, double alpha);

struct RecursionValues {
  double logF;
  double g;
};

/// One step of the exact recursions for ln F and G along a column with
/// edge tanh(gamma), used as an oracle against direct recomputation.
RecursionValues recursion_check(double logF, double g, double s, double gamma, double alpha);

/// w^T H w for the Hessian of G, restricted to directions with sum(w) = 0.
double shell_quadratic_form(const GameMatrix& M, const ModelState& state,
                            std::span<const double> w);

/// ln cosh(x) without overflow.
double log_cosh(double x);

}  // namespace mboost
