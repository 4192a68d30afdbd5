// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <random>

#include <catch_amalgamated.hpp>

#include "jsplit/partition.hpp"
#include "jsplit/testgen.hpp"
#include "oracles.hpp"

using namespace jsplit;
namespace fs = std::filesystem;

namespace {

using Ids = std::vector<std::size_t>;

// 1-based lists, as printed in the reference output.
Ids one_based(Ids v) {
  for (auto& x : v) ++x;
  return v;
}

CsrMatrix chain_matrix(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t e = 0; e + 1 < n; ++e) {
    t.push_back({e, e, 1.0});
    t.push_back({e, e + 1, -1.0});
    t.push_back({e + 1, e, -1.0});
    t.push_back({e + 1, e + 1, 1.0});
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

// 1D linear elements [[1,-1],[-1,1]] stored in the first two slots of a hex record.
ElementConnectivity chain_mesh(std::size_t n_elements) {
  ElementConnectivity mesh;
  mesh.n_nodes = n_elements + 1;
  for (std::size_t e = 0; e < n_elements; ++e) {
    mesh.elements.push_back({static_cast<std::int64_t>(e), static_cast<std::int64_t>(e + 1), -1, -1,
                             -1, -1, -1, -1});
    ElementConnectivity::ElementMatrix k{};
    k[0] = 1.0;
    k[1] = -1.0;
    k[8] = -1.0;
    k[9] = 1.0;
    mesh.stiffness.push_back(k);
    ElementConnectivity::ElementLoad f{};
    f[0] = 0.5;
    f[1] = 0.5;
    mesh.load.push_back(f);
  }
  return mesh;
}

// Sum over sharers of every partial coefficient equals the global one.
void check_partial_sums(const CsrMatrix& a, const std::vector<Substructure>& subs) {
  const auto back = reassemble(subs, a.rows());
  CHECK(max_relative_difference(back.matrix, a) <= 1e-12);
}

void check_descriptor_symmetry(const std::vector<Substructure>& subs) {
  for (const auto& sub : subs) {
    for (const auto& d : sub.interfaces) {
      const auto& other = subs[static_cast<std::size_t>(d.neighbor)];
      const InterfaceDescriptor* back = nullptr;
      for (const auto& od : other.interfaces) {
        if (od.neighbor == sub.rank) back = &od;
      }
      REQUIRE(back != nullptr);
      REQUIRE(back->local_nodes.size() == d.local_nodes.size());
      for (std::size_t k = 0; k < d.local_nodes.size(); ++k) {
        CHECK(sub.local_to_global[d.local_nodes[k]] == other.local_to_global[back->local_nodes[k]]);
      }
    }
  }
}

}  // namespace

TEST_CASE("band ranges") {
  const auto r3 = band_row_ranges(10, 3);
  CHECK(r3[0].begin == 0);
  CHECK(r3[0].end == 3);
  CHECK(r3[1].end == 6);
  CHECK(r3[2].end == 10);
  std::vector<std::size_t> sizes;
  for (const auto& r : band_row_ranges(10, 4)) sizes.push_back(r.size());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 3, 3});
  CHECK_THROWS_AS(band_row_ranges(3, 4), PartitionError);
  CHECK_THROWS_AS(band_row_ranges(3, 0), PartitionError);
}

TEST_CASE("three bands of the 10x10 example") {
  const auto sys = gen_crafted("fig5-10x10");
  const auto parts = band_row_split(sys.matrix, sys.rhs, 3);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].row_begin == 0);
  CHECK(parts[1].row_begin == 3);
  CHECK(parts[2].row_begin == 6);
  CHECK(parts[2].row_end == 10);
}

TEST_CASE("bands concatenate to the original matrix") {
  const auto sys = gen_laplace({6, Discretization::hex_fem});
  for (std::size_t p : {1u, 2u, 3u, 5u, 8u}) {
    const auto parts = band_row_split(sys.matrix, sys.rhs, p);
    std::vector<Triplet> t;
    for (const auto& part : parts) {
      CHECK(part.local_matrix.cols() == sys.matrix.cols());
      for (auto tr : part.local_matrix.to_triplets()) {
        tr.row += part.row_begin;
        t.push_back(tr);
      }
    }
    CHECK(CsrMatrix::from_triplets(sys.matrix.rows(), sys.matrix.cols(), std::move(t)) == sys.matrix);
  }
  const auto single = band_row_split(sys.matrix, sys.rhs, 1);
  CHECK(single[0].local_matrix == sys.matrix);
  CHECK(single[0].local_rhs == sys.rhs);
}

TEST_CASE("dependency lists of the 10x10 example") {
  const auto sys = gen_crafted("fig5-10x10");
  const auto deps = build_all_dependency_lists(band_row_split(sys.matrix, sys.rhs, 3));

  auto recv = [&](int p, int q) {
    const auto* n = deps[static_cast<std::size_t>(p)].find(q);
    return n ? one_based(n->recv) : Ids{};
  };
  auto send = [&](int p, int q) {
    const auto* n = deps[static_cast<std::size_t>(p)].find(q);
    return n ? one_based(n->send) : Ids{};
  };

  // receiving
  CHECK(recv(0, 1) == Ids{4, 5, 6});
  CHECK(recv(0, 2).empty());
  CHECK(recv(1, 0) == Ids{1, 3});
  CHECK(recv(1, 2) == Ids{7, 9, 10});
  CHECK(recv(2, 0) == Ids{2, 3});
  CHECK(recv(2, 1) == Ids{4, 5, 6});
  // sending
  CHECK(send(0, 1) == Ids{1, 3});
  CHECK(send(0, 2) == Ids{2, 3});
  CHECK(send(1, 0) == Ids{4, 5, 6});
  CHECK(send(1, 2) == Ids{4, 5, 6});
  CHECK(send(2, 1) == Ids{7, 9, 10});
  CHECK(send(2, 0).empty());
}

TEST_CASE("block diagonal matrix has no dependencies") {
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) t.push_back({3 * b + i, 3 * b + j, i == j ? 4.0 : -1.0});
    }
  }
  const auto a = CsrMatrix::from_triplets(9, 9, std::move(t));
  const auto deps = build_all_dependency_lists(band_row_split(a, Vector(9, 1.0), 3));
  for (const auto& d : deps) {
    CHECK(d.neighbors.empty());
    CHECK(d.ghosts.empty());
  }
}

TEST_CASE("dense matrix: each rank receives the other's range") {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) t.push_back({i, j, 1.0});
  }
  const auto a = CsrMatrix::from_triplets(6, 6, std::move(t));
  const auto deps = build_all_dependency_lists(band_row_split(a, Vector(6, 1.0), 2));
  CHECK(deps[0].find(1)->recv == Ids{3, 4, 5});
  CHECK(deps[1].find(0)->recv == Ids{0, 1, 2});
  CHECK(deps[0].find(1)->send == Ids{0, 1, 2});
}

TEST_CASE("mirror and minimality properties on random matrices") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 19;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back({i, i, 1.0});
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && u(rng) < 0.15) t.push_back({i, j, 1.0});
      }
    }
    const auto a = CsrMatrix::from_triplets(n, n, std::move(t));
    const std::size_t p = 1 + rng() % n;
    const auto parts = band_row_split(a, Vector(n, 0.0), p);
    const auto deps = build_all_dependency_lists(parts);
    for (std::size_t r = 0; r < p; ++r) {
      Ids needed;
      for (auto c : parts[r].local_matrix.col_idx()) {
        if (!parts[r].range().contains(c)) needed.push_back(c);
      }
      std::sort(needed.begin(), needed.end());
      needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
      // the union of the recv lists is exactly the set of off-band columns,
      // so dropping any entry leaves a column unresolved
      Ids got;
      for (const auto& nb : deps[r].neighbors) {
        for (auto g : nb.recv) {
          CHECK(parts[static_cast<std::size_t>(nb.rank)].range().contains(g));
          CHECK_FALSE(parts[r].range().contains(g));
          got.push_back(g);
        }
        const auto* mirror = deps[static_cast<std::size_t>(nb.rank)].find(static_cast<int>(r));
        if (!nb.recv.empty()) {
          REQUIRE(mirror != nullptr);
          CHECK(mirror->send == nb.recv);
        }
        if (!nb.send.empty()) {
          REQUIRE(mirror != nullptr);
          CHECK(mirror->recv == nb.send);
        }
      }
      std::sort(got.begin(), got.end());
      CHECK(got == needed);
      CHECK(deps[r].ghosts == needed);
    }
  }
}

TEST_CASE("greedy growing covers every vertex with balanced parts") {
  const auto sys = gen_laplace({7, Discretization::fd7});
  const auto adj = matrix_adjacency(sys.matrix);
  for (std::size_t p : {1u, 2u, 3u, 4u, 8u}) {
    const auto parts = grow_partition(adj, p);
    std::vector<std::size_t> count(p, 0);
    for (int q : parts) {
      REQUIRE(q >= 0);
      REQUIRE(static_cast<std::size_t>(q) < p);
      ++count[static_cast<std::size_t>(q)];
    }
    for (std::size_t q = 0; q + 1 < p; ++q) CHECK(count[q] == 125 / p + (q < 125 % p ? 1 : 0));
    CHECK(grow_partition(adj, p) == parts);
  }
  CHECK_THROWS_AS(grow_partition(adj, 126), PartitionError);
}

TEST_CASE("growing reseeds on disconnected graphs") {
  const Adjacency adj{{1}, {0}, {}, {4}, {3}, {}};
  const auto parts = grow_partition(adj, 2);
  CHECK(std::count(parts.begin(), parts.end(), 0) == 3);
  CHECK(std::count(parts.begin(), parts.end(), 1) == 3);
}

TEST_CASE("1D chain, element path: single interface node with summed diagonal") {
  const auto mesh = chain_mesh(4);
  const auto subs = substructures_from_element_parts(mesh, std::vector<int>{0, 0, 1, 1}, 2);
  REQUIRE(subs.size() == 2);
  for (const auto& sub : subs) {
    REQUIRE(sub.interface_count == 1);
    const std::size_t local = sub.interior_count;
    CHECK(sub.local_to_global[local] == 2);
    CHECK(sub.local_matrix.at(local, local) == 1.0);
  }
  CHECK(subs[0].interface_owner == std::vector<int>{0});
  CHECK(subs[1].interface_owner == std::vector<int>{0});
  const auto a = assemble_elements(mesh).matrix;
  CHECK(a.at(2, 2) == 2.0);
  check_partial_sums(a, subs);
  check_descriptor_symmetry(subs);
  CHECK_NOTHROW(validate_substructures(subs, 5));
}

TEST_CASE("1D chain, imported assignment: coupled pair becomes the interface") {
  const auto a = chain_matrix(5);
  const auto subs = import_node_partition(a, Vector(5, 1.0), std::vector<int>{0, 0, 0, 1, 1});
  REQUIRE(subs.size() == 2);
  for (const auto& sub : subs) {
    const Ids iface(sub.local_to_global.begin() + static_cast<std::ptrdiff_t>(sub.interior_count),
                    sub.local_to_global.end());
    CHECK(one_based(iface) == Ids{3, 4});
  }
  check_partial_sums(a, subs);
  check_descriptor_symmetry(subs);
}

TEST_CASE("single part reproduces the global system") {
  const auto sys = gen_laplace({5, Discretization::hex_fem});
  const auto subs = substructure_split(sys.matrix, sys.rhs, 1, &*sys.elements);
  REQUIRE(subs.size() == 1);
  CHECK(subs[0].interface_count == 0);
  CHECK(subs[0].local_matrix == sys.matrix);
  const auto alg = import_node_partition(sys.matrix, sys.rhs, std::vector<int>(27, 0));
  CHECK(alg[0].local_matrix == sys.matrix);
  CHECK(alg[0].local_rhs == sys.rhs);
}

TEST_CASE("hex mesh split: partial rows sum to global rows") {
  const auto sys = gen_laplace({7, Discretization::hex_fem});
  for (std::size_t p : {2u, 3u, 4u, 8u}) {
    const auto subs = substructure_split(sys.matrix, sys.rhs, p, &*sys.elements);
    check_partial_sums(sys.matrix, subs);
    check_descriptor_symmetry(subs);
    CHECK_NOTHROW(validate_substructures(subs, sys.matrix.rows()));
    const auto back = reassemble(subs, sys.matrix.rows());
    CHECK(oracle::max_abs_diff(back.rhs, sys.rhs) <= 1e-15);
  }
}

TEST_CASE("algebraic split on fd7 and random imported assignments") {
  const auto sys = gen_laplace({6, Discretization::fd7});
  for (std::size_t p : {2u, 4u, 8u}) {
    const auto subs = substructure_split(sys.matrix, sys.rhs, p);
    check_partial_sums(sys.matrix, subs);
    check_descriptor_symmetry(subs);
  }
  const auto mesh4 = gen_laplace({6, Discretization::hex_fem});
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> parts(mesh4.matrix.rows());
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] = static_cast<int>(i < 4 ? i : rng() % 4);
    const auto subs = import_node_partition(mesh4.matrix, mesh4.rhs, parts);
    check_partial_sums(mesh4.matrix, subs);
    check_descriptor_symmetry(subs);
    const auto back = reassemble(subs, mesh4.matrix.rows());
    CHECK(oracle::max_abs_diff(back.rhs, mesh4.rhs) <= 1e-15);
  }
}

TEST_CASE("substructure error cases") {
  const auto a = chain_matrix(5);
  CHECK_THROWS_AS(import_node_partition(a, Vector(5, 1.0), std::vector<int>{0, 0, 2, 2, 2}),
                  PartitionError);
  CHECK_THROWS_AS(import_node_partition(a, Vector(5, 1.0), std::vector<int>{0, 0, 1}),
                  PartitionError);
  CHECK_THROWS_AS(import_node_partition(a, Vector(5, 1.0), std::vector<int>{0, 0, -1, 1, 1}),
                  PartitionError);
  CHECK_THROWS_AS(substructure_split(a, Vector(5, 1.0), 6), PartitionError);

  const auto sys = gen_laplace({5, Discretization::hex_fem});
  auto bad = *sys.elements;
  for (auto& k : bad.stiffness[bad.size() / 2]) k *= 2.0;  // interior element
  CHECK_THROWS_AS(substructure_split(sys.matrix, sys.rhs, 2, &bad), PartitionError);
}

TEST_CASE("node partition files") {
  const auto dir = fs::temp_directory_path() / "jsplit_partition_tests";
  fs::create_directories(dir);
  const std::vector<int> parts{0, 1, 1, 0, 2};
  write_node_partition(parts, dir / "parts.txt");
  CHECK(read_node_partition(dir / "parts.txt") == parts);
  {
    std::ofstream out(dir / "short.txt");
    out << "3\n0\n1\n";
  }
  CHECK_THROWS_AS(read_node_partition(dir / "short.txt"), FormatError);
}
