// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <catch_amalgamated.hpp>

#include "jsplit/kernels.hpp"
#include "jsplit/testgen.hpp"
#include "oracles.hpp"

using namespace jsplit;
using Catch::Matchers::WithinRel;

namespace {

CsrMatrix random_csr(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (u(rng) < density) t.push_back({i, j, val(rng)});
    }
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace

TEST_CASE("worked 5x5 example has the expected CSR arrays") {
  const auto a = gen_crafted("fig4-example").matrix;
  CHECK(std::vector<double>(a.values().begin(), a.values().end()) ==
        std::vector<double>{-5, 14, 8, 1, 2, 10, 4, 2, 9, 15, 7});
  CHECK(std::vector<std::size_t>(a.col_idx().begin(), a.col_idx().end()) ==
        std::vector<std::size_t>{0, 1, 1, 2, 0, 2, 1, 3, 4, 2, 4});
  CHECK(std::vector<std::size_t>(a.row_ptr().begin(), a.row_ptr().end()) ==
        std::vector<std::size_t>{0, 2, 4, 6, 9, 11});
}

TEST_CASE("from_triplets sorts rows and sums duplicates") {
  const auto a = CsrMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 2, 4.0}});
  CHECK(a.nnz() == 3);
  CHECK(a.at(1, 2) == 5.0);
  CHECK(a.at(0, 1) == 2.0);
  CHECK(a.at(0, 0) == 0.0);
  CHECK_FALSE(a.contains(0, 0));
}

TEST_CASE("constructor rejects broken structure") {
  CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), InvalidMatrixError);
  CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), InvalidMatrixError);
  CHECK_THROWS_AS(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), InvalidMatrixError);
  CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {1, 1}, {1.0, 1.0}), InvalidMatrixError);
  CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), InvalidMatrixError);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), InvalidMatrixError);
}

TEST_CASE("spmv of the worked matrix against ones") {
  const auto a = gen_crafted("fig4-example").matrix;
  CHECK(spmv(a, Vector(5, 1.0)) == Vector{9, 9, 12, 15, 22});
}

TEST_CASE("spmv with identity returns its input") {
  const Vector x{3.5, -1.0, 0.0, 1e-300};
  CHECK(spmv(CsrMatrix::identity(4), x) == x);
}

TEST_CASE("spmv rejects a dimension mismatch") {
  CHECK_THROWS_AS(spmv(CsrMatrix::identity(3), Vector(2, 1.0)), DimensionError);
}

TEST_CASE("spmv agrees with a dense product on random patterns") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 12;
    const std::size_t cols = 1 + rng() % 12;
    const auto a = random_csr(rng, rows, cols, 0.3);
    a.validate();
    Vector x(cols);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (auto& v : x) v = val(rng);
    const auto y = spmv(a, x);
    const auto ref = oracle::dense_matvec(a, x);
    REQUIRE(y.size() == rows);
    for (std::size_t i = 0; i < rows; ++i) {
      double scale = 0.0;
      for (std::size_t j = 0; j < cols; ++j) scale += std::abs(a.at(i, j) * x[j]);
      CHECK(std::abs(y[i] - ref[i]) <= 1e-12 * std::max(scale, 1e-300));
    }
  }
}

TEST_CASE("transpose and row_slice") {
  const auto a = gen_crafted("fig4-example").matrix;
  const auto t = a.transpose();
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(t.at(j, i) == a.at(i, j));
  }
  const auto band = a.row_slice(1, 3);
  CHECK(band.rows() == 2);
  CHECK(band.cols() == 5);
  CHECK(band.at(0, 1) == 8.0);
  CHECK(band.at(1, 2) == 10.0);
}

TEST_CASE("dot, axpy and inf_norm") {
  const Vector x{1, -2, 3};
  const Vector y{4, 5, -6};
  CHECK(dot(x, y) == 4 - 10 - 18);
  CHECK(axpy(2.0, x, y) == Vector{6, 1, 0});
  CHECK(inf_norm(x) == 3.0);
  CHECK(inf_norm(Vector{}) == 0.0);
  CHECK(std::isnan(inf_norm(Vector{1.0, std::nan(""), 2.0})));
  CHECK_THROWS_AS(dot(x, Vector{1.0}), DimensionError);
}
