// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <random>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "jsplit/mm_io.hpp"
#include "jsplit/testgen.hpp"

using namespace jsplit;
namespace fs = std::filesystem;

namespace {

CsrMatrix round_trip(const CsrMatrix& a) {
  std::stringstream ss;
  write_matrix_market(a, ss);
  return read_matrix_market(ss);
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "jsplit_mm_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("general real file of the worked matrix") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "% worked example\n"
      "\n"
      "5 5 11\n"
      "1 1 -5\n1 2 14\n2 2 8\n2 3 1\n3 1 2\n3 3 10\n4 2 4\n4 4 2\n4 5 9\n5 3 15\n5 5 7\n");
  const auto a = read_matrix_market(in);
  CHECK(a == gen_crafted("fig4-example").matrix);
}

TEST_CASE("single entry file") {
  std::istringstream in("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 7.0\n");
  const auto a = read_matrix_market(in);
  CHECK(a.rows() == 1);
  CHECK(a.nnz() == 1);
  CHECK(a.at(0, 0) == 7.0);
}

TEST_CASE("symmetric lower triangle expands to full storage") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n4 4 7\n"
      "1 1 2\n2 1 -1\n2 2 2\n3 2 -1\n3 3 2\n4 3 -1\n4 4 2\n");
  const auto a = read_matrix_market(in);
  CHECK(a.nnz() == 10);
  CHECK(a == gen_crafted("tridiag-4").matrix);
  CHECK(a == a.transpose());
}

TEST_CASE("integer field is accepted") {
  std::istringstream in("%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 3\n2 2 -4\n");
  const auto a = read_matrix_market(in);
  CHECK(a.at(1, 1) == -4.0);
}

TEST_CASE("malformed input is rejected") {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_matrix_market(in);
  };
  CHECK_THROWS_AS(read(""), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix array real general\n1 1\n1\n"), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
                  FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n"),
                  FormatError);
  CHECK_THROWS_AS(read("%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n"), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n"), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), FormatError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n"), FormatError);
  CHECK_THROWS_AS(read_matrix_market(fs::path("/nonexistent/jsplit.mtx")), IoError);
}

TEST_CASE("worked matrix round trips exactly") {
  const auto a = gen_crafted("fig4-example").matrix;
  CHECK(round_trip(a) == a);
}

TEST_CASE("matrix with empty rows round trips") {
  const auto a = CsrMatrix::from_triplets(4, 3, {{0, 1, 1.5}, {3, 2, -2.0}});
  const auto b = round_trip(a);
  CHECK(b == a);
  CHECK(b.row_nnz(1) == 0);
  CHECK(b.row_nnz(2) == 0);
}

TEST_CASE("random 20x20 matrices round trip bit for bit through files") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> val(-1e6, 1e6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j < 20; ++j) {
        if (u(rng) < 0.2) t.push_back({i, j, val(rng) * std::pow(10.0, -20.0 * u(rng))});
      }
    }
    const auto a = CsrMatrix::from_triplets(20, 20, std::move(t));
    const auto path = scratch("random.mtx");
    write_matrix_market(a, path);
    const auto b = read_matrix_market(path);
    b.validate();
    CHECK(b == a);
  }
}

TEST_CASE("vector files") {
  const Vector v{1.0, -0.1, 1e-300, 6.02214076e23};
  std::stringstream ss;
  write_vector(v, ss);
  CHECK(read_vector(ss) == v);

  std::istringstream short_file("3\n1\n2\n");
  CHECK_THROWS_AS(read_vector(short_file), FormatError);
  std::istringstream bad("2\n1\nnope\n");
  CHECK_THROWS_AS(read_vector(bad), FormatError);
}
