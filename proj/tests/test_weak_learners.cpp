#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "mboost/weak_learners.hpp"
#include "support.hpp"

using namespace mboost;

TEST_CASE("optimal selection takes the largest edge, lowest index on ties") {
  const auto M = testsupport::cycle_matrix();
  const auto sel = optimal_select(M, WeightDist::uniform(3));
  CHECK(sel.index() == 0);
  CHECK(sel.r == doctest::Approx(1.0 / 3.0));
  const auto sel2 = optimal_select(M, WeightDist({0.1, 0.6, 0.3}));
  // edges: 0.1 - 0.6 + 0.3 = -0.2, 0.1 + 0.6 - 0.3 = 0.4, -0.1 + 0.6 + 0.3 = 0.8
  CHECK(sel2.index() == 2);
  CHECK(sel2.r == doctest::Approx(0.8));
}

TEST_CASE("optimal selection agrees with all_edges") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto M = testsupport::random_matrix(2 + rng() % 10, 1 + rng() % 20, rng);
    std::vector<double> w(M.rows());
    double z = 0.0;
    for (auto& v : w) z += (v = 1.0 + static_cast<double>(rng() % 100));
    for (auto& v : w) v /= z;
    const WeightDist d(w);
    const auto edges = all_edges(M, d);
    const auto sel = optimal_select(M, d);
    const auto best = std::max_element(edges.begin(), edges.end());
    CHECK(sel.index() == static_cast<std::size_t>(best - edges.begin()));
    CHECK(sel.r == *best);
  }
}

TEST_CASE("goal-edge selection takes the positive edge closest to the goal") {
  const auto M = GameMatrix::from_rows({{1, 1, -1, 1}, {1, -1, 1, -1}, {-1, 1, 1, -1}, {1, 1, 1, -1}});
  const auto d = WeightDist::uniform(4);
  // edges: 0.5, 0.5, 0.5, -0.5
  const auto sel = goal_edge_select(M, d, 0.1);
  CHECK(sel.index() == 0);
  CHECK(sel.r == doctest::Approx(0.5));
  const auto neg = GameMatrix::from_rows({{-1}, {-1}, {1}});
  CHECK_THROWS_AS(goal_edge_select(neg, WeightDist::uniform(3), 0.5), std::runtime_error);
}

TEST_CASE("bounded-edge parameters validate the construction constraints") {
  const auto p = BoundedEdgeParams::make(0.3, 0.1, 0.0, 60);
  CHECK(p.phi() == doctest::Approx(1.4 / 0.6));
  CHECK(p.cap() == 39);
  CHECK_THROWS_AS(BoundedEdgeParams::make(0.3, 0.1, 0.0, 40), std::invalid_argument);
  CHECK_THROWS_AS(BoundedEdgeParams::make(0.3, 0.1, 0.0, 61), std::invalid_argument);
  CHECK_THROWS_AS(BoundedEdgeParams::make(0.3, 0.1, 2.0, 60), std::invalid_argument);
  CHECK_THROWS_AS(BoundedEdgeParams::make(0.7, 0.3, 0.0, 60), std::invalid_argument);
  CHECK_THROWS_AS(BoundedEdgeParams::make(0.0, 0.1, 0.0, 60), std::invalid_argument);
  CHECK(BoundedEdgeParams::smallest_admissible_m(0.3, 0.1, 1.4 / 0.6) == 60);
  try {
    BoundedEdgeParams::make(0.3, 0.1, 0.0, 50);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("smallest admissible m is 60") != std::string::npos);
  }
}

TEST_CASE("bounded-edge column is the shortest heavy prefix reaching rho_bar") {
  const auto p = BoundedEdgeParams::make(0.3, 0.1, 0.0, 60);
  const auto sel = bounded_edge_select(WeightDist::uniform(60), p);
  REQUIRE(sel.is_implicit());
  // 2 * k / 60 - 1 >= 0.3 first at k = 39.
  CHECK(sel.i_bar == 39);
  CHECK(sel.r == doctest::Approx(0.3));
  const auto& col = sel.implicit_column();
  CHECK(std::count(col.begin(), col.end(), 1) == 39);
  CHECK(std::all_of(col.begin(), col.begin() + 39, [](auto v) { return v == 1; }));
}

TEST_CASE("descending_order is stable") {
  const WeightDist d({0.2, 0.3, 0.2, 0.3});
  CHECK(descending_order(d) == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("weight ratio statistic") {
  CHECK(weight_ratio_stat(WeightDist::uniform(5), 2.0) == 2.0);
  CHECK(weight_ratio_stat(WeightDist({0.1, 0.9}), 2.0) == doctest::Approx(9.0));
}

TEST_CASE("weight map matches the AdaBoost update on a prefix column") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 4 + rng() % 20;
    std::vector<double> w(m);
    double z = 0.0;
    for (auto& v : w) z += (v = 1.0 + static_cast<double>(rng() % 50));
    for (auto& v : w) v /= z;
    std::sort(w.rbegin(), w.rend());
    const WeightDist d(w);
    const std::size_t i_bar = 1 + rng() % (m - 1);
    std::vector<std::int8_t> col(m, -1);
    std::fill(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(i_bar), 1);
    const double r = edge(d, col);
    if (!(r > 0.0)) continue;
    const auto updated = update_weights(d, col, std::atanh(r));
    const auto mapped = weight_map_check(w, i_bar, r);
    for (std::size_t i = 0; i < m; ++i) CHECK(mapped[i] == doctest::Approx(updated[i]).epsilon(1e-12));
  }
}

TEST_CASE("edge scripts") {
  const auto c = EdgeScript::constant(0.4);
  CHECK(scripted_select(c, 0) == 0.4);
  CHECK(scripted_select(c, 1000000) == 0.4);
  const auto f = EdgeScript::finite({0.2, 0.3});
  CHECK(f.at(1) == 0.3);
  CHECK_THROWS_AS(f.at(2), std::out_of_range);
  const auto cyc = EdgeScript::cyclic({0.2, 0.3});
  CHECK(cyc.at(3) == 0.3);
  CHECK_THROWS_AS(EdgeScript::constant(1.0), std::invalid_argument);
  CHECK_THROWS_AS(EdgeScript::finite({}), std::invalid_argument);
}

TEST_CASE("edge scripts load from text") {
  const std::string path = "test_edges_script.txt";
  {
    std::ofstream out(path);
    out << "# edges\n0.25\n\n0.5\n";
  }
  const auto s = EdgeScript::load(path, EdgeScript::Mode::Cyclic);
  CHECK(s.edges() == std::vector<double>{0.25, 0.5});
  CHECK(s.at(2) == 0.25);
  {
    std::ofstream out(path);
    out << "0.25 junk\n";
  }
  CHECK_THROWS_AS(EdgeScript::load(path), std::invalid_argument);
  std::remove(path.c_str());
  CHECK_THROWS_AS(EdgeScript::load("does/not/exist.txt"), std::invalid_argument);
}
