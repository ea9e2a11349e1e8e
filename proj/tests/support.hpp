#pragma once

// Shared test fixtures: seeded random matrices, the separable corpus and
// long double reference evaluations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "mboost/margin_core.hpp"
#include "mboost/margin_lp.hpp"

namespace testsupport {

inline mboost::GameMatrix random_matrix(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::int8_t> data(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    bool all_plus = true;
    do {
      all_plus = true;
      for (std::size_t i = 0; i < m; ++i) {
        data[j * m + i] = (rng() >> 63) ? 1 : -1;
        all_plus = all_plus && data[j * m + i] == 1;
      }
    } while (all_plus);
  }
  return mboost::GameMatrix(m, n, std::move(data));
}

struct CorpusEntry {
  mboost::GameMatrix M;
  mboost::LPSolution lp;
};

// Random matrices with 4 <= m <= 12 and 4 <= n <= 30 whose game value is at
// least min_rho.
inline std::vector<CorpusEntry> separable_corpus(std::size_t count, std::uint64_t seed,
                                                 double min_rho = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_m(4, 12);
  std::uniform_int_distribution<std::size_t> pick_n(4, 30);
  std::vector<CorpusEntry> out;
  while (out.size() < count) {
    auto M = random_matrix(pick_m(rng), pick_n(rng), rng);
    auto lp = mboost::max_margin(M);
    if (lp.certified() && lp.rho >= min_rho) out.push_back({std::move(M), std::move(lp)});
  }
  return out;
}

inline mboost::GameMatrix cycle_matrix() {
  return mboost::GameMatrix::from_rows({{1, 1, -1}, {-1, 1, 1}, {1, -1, 1}});
}

inline std::vector<long double> margins_ld(const mboost::GameMatrix& M,
                                           const std::vector<double>& lambda) {
  std::vector<long double> out(M.rows(), 0.0L);
  for (std::size_t j = 0; j < M.cols(); ++j) {
    for (std::size_t i = 0; i < M.rows(); ++i) out[i] += static_cast<long double>(lambda[j]) * M(i, j);
  }
  return out;
}

// Plain ln sum exp(-x) in long double, with no shift.
inline long double log_f_ld(const std::vector<long double>& margins) {
  long double acc = 0.0L;
  for (auto x : margins) acc += std::exp(-x);
  return std::log(acc);
}

inline long double smooth_margin_ld(const mboost::GameMatrix& M, const std::vector<double>& lambda) {
  long double s = 0.0L;
  for (double v : lambda) s += v;
  return -log_f_ld(margins_ld(M, lambda)) / s;
}

inline long double upsilon_ld(long double r) {
  return -std::log(1.0L - r * r) / std::log((1.0L + r) / (1.0L - r));
}

inline std::vector<double> random_lambda(std::size_t n, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

inline std::vector<double> zero_sum_direction(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& e : w) e = z(rng);
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
  for (auto& e : w) e -= mean;
  // Push the residual sum onto one entry so the sum is exactly representable.
  double rest = 0.0;
  for (std::size_t j = 1; j < n; ++j) rest += w[j];
  w[0] = -rest;
  return w;
}

}  // namespace testsupport
