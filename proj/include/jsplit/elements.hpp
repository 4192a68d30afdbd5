// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jsplit/csr.hpp"
#include "jsplit/mm_io.hpp"

namespace jsplit {

/// Hexahedral mesh over the unknowns of an assembled system.
///
/// Node slots holding -1 refer to eliminated (Dirichlet) nodes; their element
/// rows and columns are dropped during assembly.
struct ElementConnectivity {
  static constexpr std::size_t nodes_per_element = 8;
  using NodeTuple = std::array<std::int64_t, nodes_per_element>;
  using ElementMatrix = std::array<double, nodes_per_element * nodes_per_element>;
  using ElementLoad = std::array<double, nodes_per_element>;

  std::size_t n_nodes = 0;
  std::vector<NodeTuple> elements;
  std::vector<ElementMatrix> stiffness;
  std::vector<ElementLoad> load;

  std::size_t size() const noexcept { return elements.size(); }

  void validate() const {
    if (stiffness.size() != elements.size() || load.size() != elements.size()) {
      throw FormatError("element value count does not match element count");
    }
    std::vector<char> referenced(n_nodes, 0);
    for (const auto& e : elements) {
      for (auto node : e) {
        if (node < -1 || node >= static_cast<std::int64_t>(n_nodes)) {
          throw FormatError("element node index " + std::to_string(node) + " out of range");
        }
        if (node >= 0) referenced[static_cast<std::size_t>(node)] = 1;
      }
    }
    for (std::size_t i = 0; i < n_nodes; ++i) {
      if (!referenced[i]) throw FormatError("node " + std::to_string(i) + " has no element");
    }
  }
};

struct AssembledSystem {
  CsrMatrix matrix;
  Vector rhs;
};

/// Assembles the listed elements into a system over a local numbering.
/// `to_local[g]` gives the local index of global node g, or -1 when the node is
/// not part of the local system. Contributions are summed in element order.
inline AssembledSystem assemble_elements(const ElementConnectivity& mesh,
                                         std::span<const std::size_t> element_ids,
                                         std::span<const std::int64_t> to_local,
                                         std::size_t n_local) {
  constexpr auto npe = ElementConnectivity::nodes_per_element;
  std::vector<Triplet> triplets;
  triplets.reserve(element_ids.size() * npe * npe);
  Vector rhs(n_local, 0.0);
  for (auto e : element_ids) {
    const auto& nodes = mesh.elements[e];
    std::array<std::int64_t, npe> local{};
    for (std::size_t a = 0; a < npe; ++a) {
      local[a] = nodes[a] < 0 ? -1 : to_local[static_cast<std::size_t>(nodes[a])];
    }
    for (std::size_t a = 0; a < npe; ++a) {
      if (local[a] < 0) continue;
      const auto row = static_cast<std::size_t>(local[a]);
      rhs[row] += mesh.load[e][a];
      for (std::size_t b = 0; b < npe; ++b) {
        if (local[b] < 0) continue;
        triplets.push_back({row, static_cast<std::size_t>(local[b]), mesh.stiffness[e][a * npe + b]});
      }
    }
  }
  return {CsrMatrix::from_triplets(n_local, n_local, std::move(triplets)), std::move(rhs)};
}

inline AssembledSystem assemble_elements(const ElementConnectivity& mesh) {
  std::vector<std::size_t> ids(mesh.size());
  for (std::size_t e = 0; e < ids.size(); ++e) ids[e] = e;
  std::vector<std::int64_t> identity(mesh.n_nodes);
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<std::int64_t>(i);
  return assemble_elements(mesh, ids, identity, mesh.n_nodes);
}

/// Connectivity file: element count line, then 8 node indices per line.
inline void write_element_connectivity(const ElementConnectivity& mesh,
                                       const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << mesh.size() << '\n';
  for (const auto& e : mesh.elements) {
    for (std::size_t a = 0; a < e.size(); ++a) out << (a ? " " : "") << e[a];
    out << '\n';
  }
}

/// Values file: element count line, then 64 stiffness entries (row-major)
/// followed by 8 load entries per line.
inline void write_element_values(const ElementConnectivity& mesh,
                                 const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << mesh.size() << '\n';
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    for (double v : mesh.stiffness[e]) out << detail::format_real(v) << ' ';
    for (std::size_t a = 0; a < mesh.load[e].size(); ++a) {
      out << detail::format_real(mesh.load[e][a]) << (a + 1 < mesh.load[e].size() ? " " : "\n");
    }
  }
}

inline ElementConnectivity read_element_mesh(const std::filesystem::path& connectivity,
                                             const std::filesystem::path& values) {
  ElementConnectivity mesh;
  {
    auto in = detail::open_input(connectivity);
    std::size_t count = 0;
    if (!(in >> count)) throw FormatError(connectivity.string() + ": bad count line");
    mesh.elements.resize(count);
    std::int64_t max_node = -1;
    for (auto& e : mesh.elements) {
      for (auto& node : e) {
        if (!(in >> node)) throw FormatError(connectivity.string() + ": truncated element list");
        max_node = std::max(max_node, node);
      }
    }
    mesh.n_nodes = static_cast<std::size_t>(max_node + 1);
  }
  {
    auto in = detail::open_input(values);
    std::size_t count = 0;
    if (!(in >> count) || count != mesh.size()) {
      throw FormatError(values.string() + ": element count differs from connectivity");
    }
    mesh.stiffness.resize(count);
    mesh.load.resize(count);
    std::string tok;
    for (std::size_t e = 0; e < count; ++e) {
      for (auto& v : mesh.stiffness[e]) {
        if (!(in >> tok)) throw FormatError(values.string() + ": truncated values");
        v = detail::parse_real(tok, values.string());
      }
      for (auto& v : mesh.load[e]) {
        if (!(in >> tok)) throw FormatError(values.string() + ": truncated values");
        v = detail::parse_real(tok, values.string());
      }
    }
  }
  mesh.validate();
  return mesh;
}

}  // namespace jsplit
