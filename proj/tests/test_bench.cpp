// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <catch_amalgamated.hpp>

#include "jsplit/bench.hpp"
#include "jsplit/testgen.hpp"

using namespace jsplit;
using Catch::Approx;

TEST_CASE("efficiency formula") {
  CHECK(efficiency(10.9, 8, 3.1) == Approx(43.9516).epsilon(1e-4));
  CHECK(efficiency(2.0, 1, 2.0) == 100.0);
  CHECK_THROWS_AS(efficiency(1.0, 0, 1.0), Error);
  CHECK_THROWS_AS(efficiency(1.0, 2, 0.0), Error);
}

TEST_CASE("bench rows and table") {
  const auto sys = gen_laplace({6, Discretization::fd7});
  BenchPlan plan;
  plan.ranks = {4, 2};
  plan.repeats = 2;
  const auto rows = run_bench(sys.matrix, sys.rhs, plan);
  REQUIRE(rows.size() == 9);
  for (std::size_t v = 0; v < 3; ++v) {
    CHECK(rows[3 * v].n_ranks == 1);
    CHECK(rows[3 * v].efficiency_pct == 100.0);
    CHECK(rows[3 * v + 1].n_ranks == 2);
    CHECK(rows[3 * v + 2].n_ranks == 4);
    for (std::size_t k = 0; k < 3; ++k) CHECK(rows[3 * v + k].efficiency_pct.has_value());
  }
  const auto table = format_bench_table(rows);
  CHECK(table.find("JBO") != std::string::npos);
  CHECK(table.find("eff(%)") != std::string::npos);
  CHECK(table.find("100.00") != std::string::npos);
}

TEST_CASE("bench refuses a divergent system") {
  const auto sys = gen_crafted("divergent-2x2");
  BenchPlan plan;
  plan.ranks = {1};
  plan.repeats = 1;
  plan.config.max_iterations = 100;
  CHECK_THROWS_AS(run_bench(sys.matrix, sys.rhs, plan), Error);
}

TEST_CASE("report CSV round trips") {
  SolveReport a;
  a.variant = Variant::jss;
  a.n_ranks = 8;
  a.iterations = 953;
  a.converged = true;
  a.comm_time_s = 0.1 + 0.2;
  a.total_time_s = 1.0 / 3.0;
  a.bytes_exchanged = 123456789012ull;
  a.residual_final = 9.98e-9;
  a.efficiency_pct = 43.81;
  SolveReport b;
  b.variant = Variant::jb;
  b.diverged = true;
  b.residual_final = std::numeric_limits<double>::infinity();

  std::stringstream ss;
  write_report_csv(ss, {a, b});
  const auto back = read_report_csv(ss);
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& x = k ? b : a;
    const auto& y = back[k];
    CHECK(y.variant == x.variant);
    CHECK(y.n_ranks == x.n_ranks);
    CHECK(y.iterations == x.iterations);
    CHECK(y.converged == x.converged);
    CHECK(y.diverged == x.diverged);
    CHECK(y.comm_time_s == x.comm_time_s);
    CHECK(y.total_time_s == x.total_time_s);
    CHECK(y.bytes_exchanged == x.bytes_exchanged);
    CHECK(y.residual_final == x.residual_final);
    CHECK(y.efficiency_pct == x.efficiency_pct);
  }

  std::istringstream bad_header("variant,n_ranks\nJB,1\n");
  CHECK_THROWS_AS(read_report_csv(bad_header), FormatError);
  std::istringstream short_row(std::string(kReportCsvHeader) + "\nJB,1,2\n");
  CHECK_THROWS_AS(read_report_csv(short_row), FormatError);
}
