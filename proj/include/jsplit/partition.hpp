// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jsplit/csr.hpp"
#include "jsplit/elements.hpp"
#include "jsplit/mm_io.hpp"

namespace jsplit {

// ---------------------------------------------------------------------------
// Band-row splitting
// ---------------------------------------------------------------------------

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// Contiguous bands of floor(n/p) rows; the n % p leftover rows go one each to
/// the last ranks.
inline std::vector<RowRange> band_row_ranges(std::size_t n, std::size_t p) {
  if (p < 1) throw PartitionError("need at least one rank");
  if (p > n) {
    throw PartitionError("cannot split " + std::to_string(n) + " rows over " +
                         std::to_string(p) + " ranks");
  }
  const std::size_t base = n / p;
  const std::size_t extra = n % p;
  std::vector<RowRange> out(p);
  std::size_t row = 0;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t height = base + (k >= p - extra ? 1 : 0);
    out[k] = {row, row + height};
    row += height;
  }
  return out;
}

/// One rank's horizontal band. The local matrix keeps the global column space.
struct BandRowPartition {
  int rank = 0;
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  CsrMatrix local_matrix;
  Vector local_rhs;

  RowRange range() const noexcept { return {row_begin, row_end}; }
  std::size_t rows() const noexcept { return row_end - row_begin; }
  friend bool operator==(const BandRowPartition&, const BandRowPartition&) = default;
};

inline std::vector<BandRowPartition> band_row_split(const CsrMatrix& a, std::span<const double> b,
                                                    std::size_t p) {
  if (!a.is_square()) throw DimensionError("band-row split needs a square matrix");
  if (b.size() != a.rows()) throw DimensionError("rhs length differs from matrix size");
  const auto ranges = band_row_ranges(a.rows(), p);
  std::vector<BandRowPartition> parts;
  parts.reserve(p);
  for (std::size_t k = 0; k < p; ++k) {
    const auto& r = ranges[k];
    parts.push_back({static_cast<int>(k), r.begin, r.end, a.row_slice(r.begin, r.end),
                     Vector(b.begin() + static_cast<std::ptrdiff_t>(r.begin),
                            b.begin() + static_cast<std::ptrdiff_t>(r.end))});
  }
  return parts;
}

inline std::vector<RowRange> ranges_of(std::span<const BandRowPartition> parts) {
  std::vector<RowRange> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(p.range());
  return out;
}

// ---------------------------------------------------------------------------
// Sparsity-pattern dependency lists
// ---------------------------------------------------------------------------

struct NeighborLists {
  int rank = 0;
  std::vector<std::size_t> send;  ///< owned global indices the neighbour needs
  std::vector<std::size_t> recv;  ///< global indices needed from the neighbour
  friend bool operator==(const NeighborLists&, const NeighborLists&) = default;
};

/// Per-rank send/recv lists plus the ghost map. Ghost slot s holds global index
/// ghosts[s]; ghosts are ascending, so the slot of g is its rank in that list.
struct DependencyLists {
  std::vector<NeighborLists> neighbors;  // ascending by rank
  std::vector<std::size_t> ghosts;

  const NeighborLists* find(int q) const {
    for (const auto& n : neighbors) {
      if (n.rank == q) return &n;
    }
    return nullptr;
  }

  NeighborLists& find_or_add(int q) {
    auto it = std::lower_bound(neighbors.begin(), neighbors.end(), q,
                               [](const NeighborLists& n, int r) { return n.rank < r; });
    if (it == neighbors.end() || it->rank != q) it = neighbors.insert(it, NeighborLists{q, {}, {}});
    return *it;
  }

  std::optional<std::size_t> ghost_slot(std::size_t global) const {
    auto it = std::lower_bound(ghosts.begin(), ghosts.end(), global);
    if (it == ghosts.end() || *it != global) return std::nullopt;
    return static_cast<std::size_t>(it - ghosts.begin());
  }

  friend bool operator==(const DependencyLists&, const DependencyLists&) = default;
};

/// Receive lists of one band: the distinct off-band columns of its local
/// matrix, grouped by the rank owning them. Send lists are left empty; see
/// mirror_send_lists.
inline DependencyLists build_dependency_lists(const BandRowPartition& part,
                                              std::span<const RowRange> all_ranges) {
  std::vector<std::size_t> cols(part.local_matrix.col_idx().begin(),
                                part.local_matrix.col_idx().end());
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  DependencyLists deps;
  for (auto c : cols) {
    if (part.range().contains(c)) continue;
    deps.ghosts.push_back(c);
  }
  std::size_t q = 0;
  for (auto g : deps.ghosts) {
    while (q < all_ranges.size() && !all_ranges[q].contains(g)) ++q;
    if (q == all_ranges.size()) {
      throw PartitionError("column " + std::to_string(g) + " is not owned by any rank");
    }
    deps.find_or_add(static_cast<int>(q)).recv.push_back(g);
  }
  return deps;
}

/// send(q -> p) := recv(p <- q) for every pair.
inline void mirror_send_lists(std::vector<DependencyLists>& all) {
  for (std::size_t p = 0; p < all.size(); ++p) {
    for (const auto& n : all[p].neighbors) {
      if (n.recv.empty()) continue;
      all[static_cast<std::size_t>(n.rank)].find_or_add(static_cast<int>(p)).send = n.recv;
    }
  }
}

inline std::vector<DependencyLists> build_all_dependency_lists(
    std::span<const BandRowPartition> parts) {
  const auto ranges = ranges_of(parts);
  std::vector<DependencyLists> all;
  all.reserve(parts.size());
  for (const auto& p : parts) all.push_back(build_dependency_lists(p, ranges));
  mirror_send_lists(all);
  return all;
}

// ---------------------------------------------------------------------------
// Graph growing
// ---------------------------------------------------------------------------

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Symmetrised off-diagonal pattern of a square matrix.
inline Adjacency matrix_adjacency(const CsrMatrix& a) {
  Adjacency adj(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (auto j : a.row(i).cols) {
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return adj;
}

/// Elements are adjacent when they share an unknown node.
inline Adjacency element_adjacency(const ElementConnectivity& mesh) {
  std::vector<std::vector<std::size_t>> node_elements(mesh.n_nodes);
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    for (auto node : mesh.elements[e]) {
      if (node >= 0) node_elements[static_cast<std::size_t>(node)].push_back(e);
    }
  }
  Adjacency adj(mesh.size());
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    for (auto node : mesh.elements[e]) {
      if (node < 0) continue;
      for (auto f : node_elements[static_cast<std::size_t>(node)]) {
        if (f != e) adj[e].push_back(f);
      }
    }
    std::sort(adj[e].begin(), adj[e].end());
    adj[e].erase(std::unique(adj[e].begin(), adj[e].end()), adj[e].end());
  }
  return adj;
}

/// Greedy graph growing into p parts balanced by vertex count. Each part is
/// seeded at the unassigned vertex of minimum degree (lowest index on ties)
/// and grown breadth-first; an exhausted frontier reseeds the same part. The
/// last part takes whatever remains.
inline std::vector<int> grow_partition(const Adjacency& adj, std::size_t p) {
  const std::size_t n = adj.size();
  if (p < 1) throw PartitionError("need at least one part");
  if (p > n) {
    throw PartitionError("cannot grow " + std::to_string(p) + " parts from " + std::to_string(n) +
                         " vertices");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return adj[x].size() < adj[y].size();
  });

  std::vector<int> part(n, -1);
  std::size_t cursor = 0;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t target = k + 1 == p ? n - assigned : n / p + (k < n % p ? 1 : 0);
    std::deque<std::size_t> frontier;
    std::size_t count = 0;
    const int label = static_cast<int>(k);
    while (count < target) {
      if (frontier.empty()) {
        while (part[order[cursor]] >= 0) ++cursor;
        const auto seed = order[cursor];
        part[seed] = label;
        ++count;
        frontier.push_back(seed);
        continue;
      }
      const auto v = frontier.front();
      frontier.pop_front();
      for (auto w : adj[v]) {
        if (count == target) break;
        if (part[w] >= 0) continue;
        part[w] = label;
        ++count;
        frontier.push_back(w);
      }
    }
    assigned += count;
  }
  return part;
}

// ---------------------------------------------------------------------------
// Substructuring
// ---------------------------------------------------------------------------

/// Interface nodes shared with one neighbouring subdomain, as local indices.
/// Both sides list the same global nodes in ascending global order.
struct InterfaceDescriptor {
  int neighbor = 0;
  std::vector<std::size_t> local_nodes;
  friend bool operator==(const InterfaceDescriptor&, const InterfaceDescriptor&) = default;
};

/// A subdomain's local system. Local numbering is interior nodes (ascending
/// global index) followed by interface nodes (ascending global index). Rows
/// and RHS entries at interface nodes are partial: summing them over all
/// sharers gives the global values.
struct Substructure {
  int rank = 0;
  CsrMatrix local_matrix;
  Vector local_rhs;
  std::vector<std::size_t> local_to_global;
  std::size_t interior_count = 0;
  std::size_t interface_count = 0;
  std::vector<InterfaceDescriptor> interfaces;  // ascending by neighbour
  std::vector<int> interface_owner;             // per interface node; lowest sharer

  std::size_t local_size() const noexcept { return interior_count + interface_count; }

  /// Whether this rank accounts for local node i in reductions.
  bool owns(std::size_t i) const {
    return i < interior_count || interface_owner[i - interior_count] == rank;
  }

  friend bool operator==(const Substructure&, const Substructure&) = default;
};

namespace detail {

/// Local numbering and interface descriptors from per-node sharer sets
/// (sorted rank lists, never empty).
inline std::vector<Substructure> layout_substructures(
    const std::vector<std::vector<int>>& sharers, std::size_t p) {
  std::vector<Substructure> subs(p);
  for (std::size_t s = 0; s < p; ++s) subs[s].rank = static_cast<int>(s);

  for (std::size_t g = 0; g < sharers.size(); ++g) {
    if (sharers[g].size() == 1) {
      subs[static_cast<std::size_t>(sharers[g][0])].local_to_global.push_back(g);
    }
  }
  for (auto& sub : subs) sub.interior_count = sub.local_to_global.size();

  for (std::size_t g = 0; g < sharers.size(); ++g) {
    const auto& sh = sharers[g];
    if (sh.size() < 2) continue;
    for (int s : sh) {
      auto& sub = subs[static_cast<std::size_t>(s)];
      const std::size_t local = sub.local_to_global.size();
      sub.local_to_global.push_back(g);
      sub.interface_owner.push_back(sh.front());
      for (int q : sh) {
        if (q == s) continue;
        auto it = std::lower_bound(
            sub.interfaces.begin(), sub.interfaces.end(), q,
            [](const InterfaceDescriptor& d, int r) { return d.neighbor < r; });
        if (it == sub.interfaces.end() || it->neighbor != q) {
          it = sub.interfaces.insert(it, InterfaceDescriptor{q, {}});
        }
        it->local_nodes.push_back(local);
      }
    }
  }
  for (auto& sub : subs) sub.interface_count = sub.local_to_global.size() - sub.interior_count;
  return subs;
}

inline std::vector<std::int64_t> global_to_local(const Substructure& sub, std::size_t global_n) {
  std::vector<std::int64_t> map(global_n, -1);
  for (std::size_t i = 0; i < sub.local_to_global.size(); ++i) {
    map[sub.local_to_global[i]] = static_cast<std::int64_t>(i);
  }
  return map;
}

inline void require_all_parts_used(std::span<const int> parts, std::size_t p) {
  std::vector<char> used(p, 0);
  for (int q : parts) {
    if (q < 0 || static_cast<std::size_t>(q) >= p) {
      throw PartitionError("part id " + std::to_string(q) + " outside [0, " + std::to_string(p) +
                           ")");
    }
    used[static_cast<std::size_t>(q)] = 1;
  }
  for (std::size_t q = 0; q < p; ++q) {
    if (!used[q]) throw PartitionError("part " + std::to_string(q) + " is empty");
  }
}

}  // namespace detail

/// Algebraic substructuring from a node -> part assignment. A node coupled to
/// a node of another part is an interface node; its sharers are its own part
/// plus the parts of all its neighbours. Interface diagonal and RHS entries
/// are divided equally among sharers(i), interface-interface couplings among
/// sharers(i) ∩ sharers(j).
inline std::vector<Substructure> substructures_from_node_parts(const CsrMatrix& a,
                                                               std::span<const double> b,
                                                               std::span<const int> parts,
                                                               std::size_t p) {
  if (!a.is_square()) throw DimensionError("substructuring needs a square matrix");
  if (b.size() != a.rows()) throw DimensionError("rhs length differs from matrix size");
  if (parts.size() != a.rows()) {
    throw PartitionError("node partition has " + std::to_string(parts.size()) +
                         " entries for " + std::to_string(a.rows()) + " nodes");
  }
  detail::require_all_parts_used(parts, p);

  const auto adj = matrix_adjacency(a);
  std::vector<std::vector<int>> sharers(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto& sh = sharers[i];
    sh.push_back(parts[i]);
    for (auto j : adj[i]) sh.push_back(parts[j]);
    std::sort(sh.begin(), sh.end());
    sh.erase(std::unique(sh.begin(), sh.end()), sh.end());
  }

  auto subs = detail::layout_substructures(sharers, p);
  std::vector<std::vector<std::int64_t>> to_local;
  to_local.reserve(p);
  for (const auto& sub : subs) to_local.push_back(detail::global_to_local(sub, a.rows()));

  std::vector<std::vector<Triplet>> triplets(p);
  std::vector<int> common;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      const auto j = r.cols[k];
      std::span<const int> targets;
      if (i == j) {
        targets = sharers[i];
      } else if (sharers[i].size() == 1) {
        targets = sharers[i];
      } else if (sharers[j].size() == 1) {
        targets = sharers[j];
      } else {
        common.clear();
        std::set_intersection(sharers[i].begin(), sharers[i].end(), sharers[j].begin(),
                              sharers[j].end(), std::back_inserter(common));
        targets = common;
      }
      if (targets.empty()) {
        throw PartitionError("coupling (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") has no common subdomain");
      }
      const double share = r.values[k] / static_cast<double>(targets.size());
      for (int s : targets) {
        const auto& map = to_local[static_cast<std::size_t>(s)];
        if (map[i] < 0 || map[j] < 0) {
          throw PartitionError("coupling (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") not local to subdomain " + std::to_string(s));
        }
        triplets[static_cast<std::size_t>(s)].push_back(
            {static_cast<std::size_t>(map[i]), static_cast<std::size_t>(map[j]), share});
      }
    }
  }

  for (std::size_t s = 0; s < p; ++s) {
    auto& sub = subs[s];
    const auto n_local = sub.local_size();
    sub.local_matrix = CsrMatrix::from_triplets(n_local, n_local, std::move(triplets[s]));
    sub.local_rhs.resize(n_local);
    for (std::size_t l = 0; l < n_local; ++l) {
      const auto g = sub.local_to_global[l];
      sub.local_rhs[l] = b[g] / static_cast<double>(sharers[g].size());
    }
  }
  return subs;
}

/// Element substructuring from an element -> part assignment. Local systems
/// are assembled from each part's own elements, so interface blocks are
/// partial by construction.
inline std::vector<Substructure> substructures_from_element_parts(const ElementConnectivity& mesh,
                                                                  std::span<const int> parts,
                                                                  std::size_t p) {
  if (parts.size() != mesh.size()) throw PartitionError("element partition size mismatch");
  detail::require_all_parts_used(parts, p);

  std::vector<std::vector<int>> sharers(mesh.n_nodes);
  std::vector<std::vector<std::size_t>> part_elements(p);
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    part_elements[static_cast<std::size_t>(parts[e])].push_back(e);
    for (auto node : mesh.elements[e]) {
      if (node >= 0) sharers[static_cast<std::size_t>(node)].push_back(parts[e]);
    }
  }
  for (std::size_t g = 0; g < sharers.size(); ++g) {
    auto& sh = sharers[g];
    if (sh.empty()) throw PartitionError("node " + std::to_string(g) + " has no element");
    std::sort(sh.begin(), sh.end());
    sh.erase(std::unique(sh.begin(), sh.end()), sh.end());
  }

  auto subs = detail::layout_substructures(sharers, p);
  for (std::size_t s = 0; s < p; ++s) {
    auto& sub = subs[s];
    const auto map = detail::global_to_local(sub, mesh.n_nodes);
    auto local = assemble_elements(mesh, part_elements[s], map, sub.local_size());
    sub.local_matrix = std::move(local.matrix);
    sub.local_rhs = std::move(local.rhs);
  }
  return subs;
}

/// Largest entrywise gap between two matrices, relative to the larger magnitude.
inline double max_relative_difference(const CsrMatrix& x, const CsrMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  auto visit = [&](const CsrMatrix& lhs, const CsrMatrix& rhs) {
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
      const auto r = lhs.row(i);
      for (std::size_t k = 0; k < r.cols.size(); ++k) {
        const double other = rhs.at(i, r.cols[k]);
        const double scale = std::max({std::abs(r.values[k]), std::abs(other), 1e-300});
        worst = std::max(worst, std::abs(r.values[k] - other) / scale);
      }
    }
  };
  visit(x, y);
  visit(y, x);
  return worst;
}

/// Splits A into p substructures. With a mesh the element path is used (the
/// mesh must assemble to A); otherwise nodes are grown on the matrix graph.
inline std::vector<Substructure> substructure_split(const CsrMatrix& a, std::span<const double> b,
                                                    std::size_t p,
                                                    const ElementConnectivity* mesh = nullptr) {
  if (!a.is_square()) throw DimensionError("substructuring needs a square matrix");
  if (mesh == nullptr) {
    const auto parts = grow_partition(matrix_adjacency(a), p);
    return substructures_from_node_parts(a, b, parts, p);
  }

  mesh->validate();
  if (mesh->n_nodes != a.rows()) throw PartitionError("mesh node count differs from matrix size");
  const auto assembled = assemble_elements(*mesh);
  if (max_relative_difference(assembled.matrix, a) > 1e-12) {
    throw PartitionError("element matrices do not assemble to the given matrix");
  }
  const auto parts = grow_partition(element_adjacency(*mesh), p);
  return substructures_from_element_parts(*mesh, parts, p);
}

/// Node partition file: a count line, then one part id per line (line i is
/// node i).
inline std::vector<int> read_node_partition(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::size_t count = 0;
  if (!(in >> count)) throw FormatError(path.string() + ": bad count line");
  std::vector<int> parts(count);
  for (auto& q : parts) {
    if (!(in >> q)) throw FormatError(path.string() + ": missing part assignments");
  }
  return parts;
}

inline void write_node_partition(std::span<const int> parts, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << parts.size() << '\n';
  for (int q : parts) out << q << '\n';
}

/// Algebraic substructuring from an externally computed node partition. The
/// number of subdomains is the largest part id plus one.
inline std::vector<Substructure> import_node_partition(const CsrMatrix& a,
                                                       std::span<const double> b,
                                                       std::span<const int> parts) {
  if (parts.size() != a.rows()) {
    throw PartitionError("partition lists " + std::to_string(parts.size()) + " nodes, matrix has " +
                         std::to_string(a.rows()));
  }
  if (parts.empty()) throw PartitionError("empty partition");
  const int top = *std::max_element(parts.begin(), parts.end());
  if (top < 0) throw PartitionError("negative part id");
  return substructures_from_node_parts(a, b, parts, static_cast<std::size_t>(top) + 1);
}

inline std::vector<Substructure> import_node_partition(const CsrMatrix& a,
                                                       std::span<const double> b,
                                                       const std::filesystem::path& part_file) {
  const auto parts = read_node_partition(part_file);
  return import_node_partition(a, b, parts);
}

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

/// Sums every subdomain's partial copy back into global numbering.
inline AssembledSystem reassemble(std::span<const Substructure> subs, std::size_t global_n) {
  std::vector<Triplet> t;
  Vector rhs(global_n, 0.0);
  for (const auto& sub : subs) {
    for (const auto& e : sub.local_matrix.to_triplets()) {
      t.push_back({sub.local_to_global[e.row], sub.local_to_global[e.col], e.value});
    }
    for (std::size_t l = 0; l < sub.local_size(); ++l) {
      rhs[sub.local_to_global[l]] += sub.local_rhs[l];
    }
  }
  return {CsrMatrix::from_triplets(global_n, global_n, std::move(t)), std::move(rhs)};
}

/// Throws unless the descriptors are symmetric and aligned and every node is
/// covered (interior nodes exactly once).
inline void validate_substructures(std::span<const Substructure> subs, std::size_t global_n) {
  std::vector<int> interior_hits(global_n, 0);
  std::vector<char> covered(global_n, 0);
  for (const auto& sub : subs) {
    if (sub.local_to_global.size() != sub.local_size() ||
        sub.interface_owner.size() != sub.interface_count ||
        sub.local_matrix.rows() != sub.local_size() || sub.local_rhs.size() != sub.local_size()) {
      throw PartitionError("subdomain " + std::to_string(sub.rank) + " has inconsistent sizes");
    }
    for (std::size_t l = 0; l < sub.local_size(); ++l) {
      const auto g = sub.local_to_global[l];
      if (g >= global_n) throw PartitionError("local_to_global entry out of range");
      covered[g] = 1;
      if (l < sub.interior_count) ++interior_hits[g];
    }
    for (const auto& d : sub.interfaces) {
      if (d.neighbor < 0 || static_cast<std::size_t>(d.neighbor) >= subs.size() ||
          d.neighbor == sub.rank) {
        throw PartitionError("bad neighbour in subdomain " + std::to_string(sub.rank));
      }
      const auto& other = subs[static_cast<std::size_t>(d.neighbor)];
      auto it = std::find_if(other.interfaces.begin(), other.interfaces.end(),
                             [&](const InterfaceDescriptor& o) { return o.neighbor == sub.rank; });
      if (it == other.interfaces.end() || it->local_nodes.size() != d.local_nodes.size()) {
        throw PartitionError("interface " + std::to_string(sub.rank) + "/" +
                             std::to_string(d.neighbor) + " is not symmetric");
      }
      for (std::size_t k = 0; k < d.local_nodes.size(); ++k) {
        if (d.local_nodes[k] < sub.interior_count ||
            sub.local_to_global[d.local_nodes[k]] != other.local_to_global[it->local_nodes[k]]) {
          throw PartitionError("interface " + std::to_string(sub.rank) + "/" +
                               std::to_string(d.neighbor) + " is misaligned");
        }
      }
    }
  }
  for (std::size_t g = 0; g < global_n; ++g) {
    if (!covered[g]) throw PartitionError("node " + std::to_string(g) + " is in no subdomain");
    if (interior_hits[g] > 1) throw PartitionError("interior node in several subdomains");
  }
}

}  // namespace jsplit
