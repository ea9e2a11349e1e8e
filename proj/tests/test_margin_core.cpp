#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "mboost/margin_core.hpp"
#include "support.hpp"

using namespace mboost;
using testsupport::random_matrix;

using testsupport::random_lambda;
using testsupport::zero_sum_direction;

TEST_CASE("parse_matrix accepts +1 spellings and rejects malformed input") {
  std::istringstream ok("3 2\n1 -1\n+1 1\n-1 -1\n");
  const auto M = parse_matrix(ok);
  CHECK(M.rows() == 3);
  CHECK(M.cols() == 2);
  CHECK(M(1, 0) == 1);
  CHECK(M(2, 1) == -1);

  std::istringstream bad_token("2 1\n1\n0\n");
  CHECK_THROWS_AS(parse_matrix(bad_token), std::invalid_argument);
  std::istringstream short_input("2 2\n1 -1\n1\n");
  CHECK_THROWS_AS(parse_matrix(short_input), std::invalid_argument);
  std::istringstream trailing("2 1\n1\n-1\n1\n");
  CHECK_THROWS_AS(parse_matrix(trailing), std::invalid_argument);
  std::istringstream perfect("2 1\n1\n1\n");
  CHECK_THROWS_AS(parse_matrix(perfect), std::invalid_argument);
  std::istringstream one_row("1 1\n-1\n");
  CHECK_THROWS_AS(parse_matrix(one_row), std::invalid_argument);
}

TEST_CASE("write_matrix round-trips") {
  std::mt19937_64 rng(3);
  const auto M = random_matrix(7, 5, rng);
  std::stringstream ss;
  write_matrix(ss, M);
  const auto back = parse_matrix(ss);
  REQUIRE(back.rows() == M.rows());
  REQUIRE(back.cols() == M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) CHECK(back(i, j) == M(i, j));
  }
}

TEST_CASE("append_column validates its input") {
  auto pool = GameMatrix::empty_pool(3);
  CHECK(pool.cols() == 0);
  const std::vector<std::int8_t> col{1, -1, 1};
  CHECK(pool.append_column(col) == 0);
  CHECK(pool.cols() == 1);
  const std::vector<std::int8_t> all_plus{1, 1, 1};
  CHECK_THROWS_AS(pool.append_column(all_plus), std::invalid_argument);
  const std::vector<std::int8_t> short_col{1, -1};
  CHECK_THROWS_AS(pool.append_column(short_col), std::invalid_argument);
}

TEST_CASE("WeightDist validation") {
  CHECK_NOTHROW(WeightDist({0.25, 0.75}));
  CHECK_THROWS_AS(WeightDist({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(WeightDist({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(WeightDist(std::vector<double>{}), std::invalid_argument);
  const auto u = WeightDist::uniform(4);
  CHECK(u[2] == doctest::Approx(0.25));
}

TEST_CASE("loss and smooth margin agree with a long double evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto M = random_matrix(2 + rng() % 10, 1 + rng() % 12, rng);
    const auto lambda = random_lambda(M.cols(), 3.0, rng);
    const auto st = ModelState::from_lambda(M, lambda);
    const auto ref = testsupport::margins_ld(M, lambda);
    CHECK(exp_loss_log(st) == doctest::Approx(static_cast<double>(testsupport::log_f_ld(ref))).epsilon(1e-12));
    if (st.s > 0.0) {
      const double G = smooth_margin(st);
      const auto G_ref = static_cast<double>(testsupport::smooth_margin_ld(M, lambda));
      CHECK(std::abs(G - G_ref) <= 1e-12 * std::max(1.0, std::abs(G_ref)));
    }
  }
}

TEST_CASE("shifted log-sum-exp survives large margins") {
  const auto M = GameMatrix::from_rows({{1, -1}, {1, 1}, {-1, 1}});
  const auto st = ModelState::from_lambda(M, {2000.0, 1000.0});
  // margins are 1000, 3000, -1000; ln F is dominated by the last one.
  CHECK(exp_loss_log(st) == doctest::Approx(1000.0));
  CHECK(std::isfinite(smooth_margin(st)));
  CHECK(margin(st) == doctest::Approx(-1000.0 / 3000.0));
}

TEST_CASE("smooth margin and margin need a nonzero lambda") {
  const auto M = testsupport::cycle_matrix();
  const auto st = ModelState::zero(M);
  CHECK_THROWS_AS(smooth_margin(st), std::invalid_argument);
  CHECK_THROWS_AS(margin(st), std::invalid_argument);
  CHECK(exp_loss_log(st) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("sandwich between smooth margin and margin") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto M = random_matrix(2 + rng() % 10, 1 + rng() % 10, rng);
    const auto st = ModelState::from_lambda(M, random_lambda(M.cols(), 2.0, rng));
    if (!(st.s > 0.0)) continue;
    const double G = smooth_margin(st);
    const double mu = margin(st);
    const double m = static_cast<double>(M.rows());
    CHECK(-std::log(m) / st.s + mu <= G + 1e-12);
    CHECK(G < mu);
  }
}

TEST_CASE("smooth margin increases radially") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto M = random_matrix(2 + rng() % 8, 1 + rng() % 8, rng);
    const auto st = ModelState::from_lambda(M, random_lambda(M.cols(), 1.0, rng));
    if (!(st.s > 0.0)) continue;
    const double a = 1.0 + 0.5 * static_cast<double>(rng() % 8 + 1);
    CHECK(smooth_margin(st.scaled(a)) > smooth_margin(st));
  }
}

TEST_CASE("support vectors attain the minimum margin") {
  const auto M = GameMatrix::from_rows({{1, -1}, {-1, 1}, {1, 1}});
  const auto st = ModelState::from_lambda(M, {1.0, 1.0});
  const auto sv = support_vectors(st);
  CHECK(sv == std::vector<std::size_t>{0, 1});
}

TEST_CASE("upsilon reference values") {
  // Frozen from a 40-digit evaluation of -ln(1 - r^2) / ln((1 + r) / (1 - r)).
  CHECK(upsilon(0.3) == doctest::Approx(0.15235009057673961).epsilon(1e-14));
  CHECK(upsilon(0.4) == doctest::Approx(0.20577579065890786).epsilon(1e-14));
  CHECK(upsilon((std::sqrt(5.0) - 1.0) / 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(upsilon(0.0), std::domain_error);
  CHECK_THROWS_AS(upsilon(1.0), std::domain_error);
}

TEST_CASE("upsilon lies strictly between r/2 and r and increases") {
  double prev = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double r = k / 1000.0;
    const double u = upsilon(r);
    CHECK(u > r / 2.0);
    CHECK(u < r);
    CHECK(u > prev);
    CHECK(u == doctest::Approx(static_cast<double>(testsupport::upsilon_ld(r))).epsilon(1e-13));
    prev = u;
  }
}

TEST_CASE("gamma_of rejects degenerate edges") {
  CHECK(gamma_of(0.5) == doctest::Approx(std::atanh(0.5)));
  CHECK(gamma_of(-0.5) == doctest::Approx(-std::atanh(0.5)));
  CHECK_THROWS_AS(gamma_of(1.0), std::domain_error);
  CHECK_THROWS_AS(gamma_of(1.0 - 1e-13), std::domain_error);
}

TEST_CASE("edge of a column is d_plus - d_minus") {
  const auto M = GameMatrix::from_rows({{1, -1}, {-1, 1}, {1, 1}});
  const WeightDist d({0.5, 0.25, 0.25});
  CHECK(edge(M, d, 0) == doctest::Approx(0.5));
  CHECK(edge(M, d, 1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(edge(M, d, 2), std::out_of_range);
}

TEST_CASE("AdaBoost update zeroes the chosen edge and scales the loss") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto M = random_matrix(3 + rng() % 9, 1 + rng() % 6, rng);
    auto st = ModelState::from_lambda(M, random_lambda(M.cols(), 1.0, rng));
    // d is proportional to exp(-margins).
    std::vector<double> w(M.rows());
    const double lo = st.min_margin();
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] = std::exp(-(st.margins[i] - lo)));
    for (auto& v : w) v /= z;
    const WeightDist d(w);
    const std::size_t j = rng() % M.cols();
    const double r = edge(M, d, j);
    if (!(std::abs(r) < 0.999)) continue;
    const double alpha = gamma_of(r);
    const double before = exp_loss_log(st);
    const auto next = update_weights(d, M.column(j), alpha);
    st.apply_step(M, j, alpha);
    CHECK(edge(next, M.column(j)) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(exp_loss_log(st) - before == doctest::Approx(0.5 * std::log1p(-r * r)).epsilon(1e-10));
    double total = 0.0;
    for (double v : next.weights()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("recursions match direct recomputation") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> step(0.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto M = random_matrix(3 + rng() % 9, 2 + rng() % 6, rng);
    auto st = ModelState::from_lambda(M, random_lambda(M.cols(), 1.5, rng));
    if (!(st.s > 0.0)) continue;
    std::vector<double> w(M.rows());
    const double lo = st.min_margin();
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] = std::exp(-(st.margins[i] - lo)));
    for (auto& v : w) v /= z;
    const WeightDist d(w);
    const std::size_t j = rng() % M.cols();
    const double r = edge(M, d, j);
    if (!(std::abs(r) < 0.999)) continue;
    const double alpha = step(rng);
    const auto rv = recursion_check(exp_loss_log(st), smooth_margin(st), st.s, gamma_of(r), alpha);
    auto lambda = st.lambda;
    lambda[j] += alpha;
    const auto ref_margins = testsupport::margins_ld(M, lambda);
    CHECK(rv.logF == doctest::Approx(static_cast<double>(testsupport::log_f_ld(ref_margins))).epsilon(1e-11));
    CHECK(rv.g == doctest::Approx(static_cast<double>(testsupport::smooth_margin_ld(M, lambda))).epsilon(1e-10));
  }
}

TEST_CASE("recursion from the origin") {
  const auto rv = recursion_check(std::log(4.0), 0.0, 0.0, std::atanh(0.5), std::atanh(0.5));
  CHECK(rv.logF == doctest::Approx(std::log(4.0) + 0.5 * std::log(0.75)));
  CHECK_THROWS_AS(recursion_check(0.0, 0.0, 0.0, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("shell quadratic form is nonpositive") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto M = random_matrix(2 + rng() % 12, 2 + rng() % 12, rng);
    const auto st = ModelState::from_lambda(M, random_lambda(M.cols(), 3.0, rng));
    if (!(st.s > 0.0)) continue;
    const auto w = zero_sum_direction(M.cols(), rng);
    CHECK(shell_quadratic_form(M, st, w) <= 1e-10);
  }
}

TEST_CASE("shell quadratic form vanishes on a direction with constant M w") {
  const auto M = GameMatrix::from_rows({{-1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}});
  const std::vector<double> w{-0.5, 1.0, 1.0, -1.5};
  const auto Mw = M.multiply(w);
  for (double v : Mw) CHECK(v == doctest::Approx(1.0));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto st = ModelState::from_lambda(M, random_lambda(4, 2.0, rng));
    CHECK(std::abs(shell_quadratic_form(M, st, w)) <= 1e-10);
  }
}

TEST_CASE("shell quadratic form matches a second difference") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 200; ++trial) {
    const auto M = random_matrix(3 + rng() % 8, 3 + rng() % 8, rng);
    auto lambda = random_lambda(M.cols(), 2.0, rng);
    for (auto& v : lambda) v += 0.5;
    const auto st = ModelState::from_lambda(M, lambda);
    const auto w = zero_sum_direction(M.cols(), rng);
    const double form = shell_quadratic_form(M, st, w);
    const long double h = 1e-3L;
    auto G_at = [&](long double eps) {
      std::vector<long double> margins(M.rows(), 0.0L);
      for (std::size_t j = 0; j < M.cols(); ++j) {
        for (std::size_t i = 0; i < M.rows(); ++i) margins[i] += (lambda[j] + eps * w[j]) * M(i, j);
      }
      return -testsupport::log_f_ld(margins) / st.s;
    };
    const auto fd = static_cast<double>((G_at(h) - 2.0L * G_at(0.0L) + G_at(-h)) / (h * h));
    CHECK(std::abs(fd - form) <= std::max(1e-4, 0.05 * std::abs(form)));
  }
}

TEST_CASE("shell quadratic form rejects directions that change the l1 norm") {
  const auto M = testsupport::cycle_matrix();
  const auto st = ModelState::from_lambda(M, {1.0, 1.0, 1.0});
  const std::vector<double> w{1.0, 0.0, 0.0};
  CHECK_THROWS_AS(shell_quadratic_form(M, st, w), std::invalid_argument);
}

TEST_CASE("log_cosh is stable for large arguments") {
  CHECK(log_cosh(0.0) == doctest::Approx(0.0));
  CHECK(log_cosh(1.0) == doctest::Approx(std::log(std::cosh(1.0))));
  CHECK(log_cosh(-800.0) == doctest::Approx(800.0 - std::log(2.0)));
}
