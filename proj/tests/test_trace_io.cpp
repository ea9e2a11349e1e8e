#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "mboost/boosters.hpp"
#include "mboost/trace_io.hpp"
#include "support.hpp"

using namespace mboost;

namespace {

void check_round_trip(const std::vector<IterationRecord>& records, TraceFormat format) {
  std::stringstream ss;
  write_trace(ss, records, format);
  const auto back = read_trace(ss, format);
  REQUIRE(back.size() == records.size());
  for (std::size_t k = 0; k < records.size(); ++k) CHECK(same_record(records[k], back[k]));
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<double>(static_cast<int>(rng() % 40) - 20));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("real run traces round-trip in both formats") {
  const auto corpus = testsupport::separable_corpus(3, 5);
  for (const auto& entry : corpus) {
    RunConfig cfg;
    cfg.rule = StepRule::CoordinateAscent;
    cfg.max_iters = 300;
    const auto res = run(entry.M, cfg);
    check_round_trip(res.records, TraceFormat::Csv);
    check_round_trip(res.records, TraceFormat::Jsonl);
  }
}

TEST_CASE("NaN margins and implicit columns survive") {
  RunConfig cfg;
  cfg.rule = StepRule::ApproxCoordinateAscent;
  cfg.max_iters = 50;
  const auto scripted = run_scripted(EdgeScript::constant(0.4), cfg, ScriptedStart::at(1.0, 0.1));
  REQUIRE(std::isnan(scripted.records.back().mu));
  check_round_trip(scripted.records, TraceFormat::Csv);
  check_round_trip(scripted.records, TraceFormat::Jsonl);

  RunConfig bcfg;
  bcfg.max_iters = 50;
  bcfg.learner = BoundedEdgeParams::make(0.3, 0.1, 0.0, 60);
  const auto implicit = run_implicit(bcfg);
  REQUIRE(implicit.records.front().implicit);
  check_round_trip(implicit.records, TraceFormat::Csv);
  check_round_trip(implicit.records, TraceFormat::Jsonl);

  std::stringstream ss;
  write_trace(ss, {implicit.records.front()}, TraceFormat::Csv);
  CHECK(ss.str().find(",i0,") != std::string::npos);
}

TEST_CASE("malformed traces are rejected with a line number") {
  {
    std::stringstream ss("t,j,r\n");
    CHECK_THROWS_AS(read_trace(ss, TraceFormat::Csv), std::invalid_argument);
  }
  {
    std::stringstream ss("t,j,r,gamma,alpha,s,g,mu,logF\n1,0,0.5,x,1,1,0,0,0\n");
    try {
      read_trace(ss, TraceFormat::Csv);
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  {
    std::stringstream ss("{\"t\": 1}\n");
    CHECK_THROWS_AS(read_trace(ss, TraceFormat::Jsonl), std::invalid_argument);
  }
  CHECK_THROWS_AS(parse_trace_format("xml"), std::invalid_argument);
  CHECK_THROWS_AS(read_trace_file("no/such/trace.csv", TraceFormat::Csv), std::invalid_argument);
}

TEST_CASE("trace files") {
  RunConfig cfg;
  cfg.max_iters = 40;
  const auto res = run(testsupport::cycle_matrix(), cfg);
  const std::string path = "test_trace_io_tmp.jsonl";
  write_trace_file(path, res.records, TraceFormat::Jsonl);
  const auto back = read_trace_file(path, TraceFormat::Jsonl);
  REQUIRE(back.size() == res.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) CHECK(same_record(back[k], res.records[k]));
  std::remove(path.c_str());
}
