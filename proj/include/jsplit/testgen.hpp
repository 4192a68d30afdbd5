// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jsplit/csr.hpp"
#include "jsplit/elements.hpp"
#include "jsplit/kernels.hpp"

namespace jsplit {

enum class Discretization { fd7, hex_fem };

inline std::string to_string(Discretization d) {
  return d == Discretization::fd7 ? "fd7" : "hex-fem";
}

inline Discretization parse_discretization(const std::string& s) {
  if (s == "fd7") return Discretization::fd7;
  if (s == "hex-fem") return Discretization::hex_fem;
  throw Error("unknown discretization '" + s + "'");
}

/// Uniform m x m x m grid on the unit cube.
struct MeshSpec {
  std::size_t m = 3;
  Discretization discretization = Discretization::fd7;

  double spacing() const { return 1.0 / static_cast<double>(m - 1); }
  std::size_t interior_per_axis() const { return m - 2; }
  std::size_t unknowns() const {
    const auto k = interior_per_axis();
    return k * k * k;
  }
};

struct LaplaceSystem {
  CsrMatrix matrix;
  Vector rhs;
  std::optional<ElementConnectivity> elements;
};

/// Right-hand side of the model problem.
inline double laplace_source(double x, double y, double /*z*/) { return std::cos(x + y); }

namespace detail {

// Trilinear hexahedron vertex offsets, counter-clockwise on the bottom face
// then on the top face.
inline constexpr std::array<std::array<int, 3>, 8> hex_corners{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

inline double hat(int corner, double t) { return corner ? t : 1.0 - t; }
inline double hat_slope(int corner) { return corner ? 1.0 : -1.0; }

inline std::array<double, 2> gauss_points_01() {
  const double g = 0.5 / std::sqrt(3.0);
  return {0.5 - g, 0.5 + g};
}

/// Laplace stiffness of a cube of side h, 2x2x2 Gauss quadrature.
inline ElementConnectivity::ElementMatrix hex_stiffness(double h) {
  ElementConnectivity::ElementMatrix k{};
  const auto gp = gauss_points_01();
  const double weight = 0.125;  // per point on the reference unit cube
  for (double x : gp) {
    for (double y : gp) {
      for (double z : gp) {
        std::array<std::array<double, 3>, 8> grad{};
        for (std::size_t a = 0; a < 8; ++a) {
          const auto& c = hex_corners[a];
          grad[a] = {hat_slope(c[0]) * hat(c[1], y) * hat(c[2], z),
                     hat(c[0], x) * hat_slope(c[1]) * hat(c[2], z),
                     hat(c[0], x) * hat(c[1], y) * hat_slope(c[2])};
        }
        for (std::size_t a = 0; a < 8; ++a) {
          for (std::size_t b = 0; b < 8; ++b) {
            k[a * 8 + b] += weight * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1] +
                                      grad[a][2] * grad[b][2]);
          }
        }
      }
    }
  }
  // grad scales as 1/h, volume as h^3
  for (auto& v : k) v *= h;
  return k;
}

/// Consistent load: integral of f * phi_a over the element at origin (x0,y0,z0).
inline ElementConnectivity::ElementLoad hex_load(double x0, double y0, double z0, double h) {
  ElementConnectivity::ElementLoad f{};
  const auto gp = gauss_points_01();
  const double weight = 0.125 * h * h * h;
  for (double x : gp) {
    for (double y : gp) {
      for (double z : gp) {
        const double src = laplace_source(x0 + x * h, y0 + y * h, z0 + z * h);
        for (std::size_t a = 0; a < 8; ++a) {
          const auto& c = hex_corners[a];
          f[a] += weight * src * hat(c[0], x) * hat(c[1], y) * hat(c[2], z);
        }
      }
    }
  }
  return f;
}

inline LaplaceSystem gen_fd7(const MeshSpec& spec) {
  const std::size_t k = spec.interior_per_axis();
  const double h = spec.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const std::size_t n = spec.unknowns();
  auto id = [k](std::size_t i, std::size_t j, std::size_t l) { return i + k * (j + k * l); };

  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  Vector rhs(n);
  row_ptr.reserve(n + 1);
  col_idx.reserve(7 * n);
  values.reserve(7 * n);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < k; ++i) {
        // neighbours in increasing column order
        if (l > 0) { col_idx.push_back(id(i, j, l - 1)); values.push_back(-inv_h2); }
        if (j > 0) { col_idx.push_back(id(i, j - 1, l)); values.push_back(-inv_h2); }
        if (i > 0) { col_idx.push_back(id(i - 1, j, l)); values.push_back(-inv_h2); }
        col_idx.push_back(id(i, j, l));
        values.push_back(6.0 * inv_h2);
        if (i + 1 < k) { col_idx.push_back(id(i + 1, j, l)); values.push_back(-inv_h2); }
        if (j + 1 < k) { col_idx.push_back(id(i, j + 1, l)); values.push_back(-inv_h2); }
        if (l + 1 < k) { col_idx.push_back(id(i, j, l + 1)); values.push_back(-inv_h2); }
        row_ptr.push_back(col_idx.size());
        rhs[id(i, j, l)] = laplace_source(static_cast<double>(i + 1) * h,
                                          static_cast<double>(j + 1) * h,
                                          static_cast<double>(l + 1) * h);
      }
    }
  }
  return {CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values)),
          std::move(rhs), std::nullopt};
}

inline ElementConnectivity hex_mesh(const MeshSpec& spec) {
  const std::size_t m = spec.m;
  const std::size_t k = spec.interior_per_axis();
  const double h = spec.spacing();
  auto unknown = [&](std::size_t i, std::size_t j, std::size_t l) -> std::int64_t {
    if (i == 0 || j == 0 || l == 0 || i == m - 1 || j == m - 1 || l == m - 1) return -1;
    return static_cast<std::int64_t>((i - 1) + k * ((j - 1) + k * (l - 1)));
  };

  ElementConnectivity mesh;
  mesh.n_nodes = spec.unknowns();
  const auto ke = hex_stiffness(h);
  const std::size_t ne = (m - 1) * (m - 1) * (m - 1);
  mesh.elements.reserve(ne);
  mesh.stiffness.reserve(ne);
  mesh.load.reserve(ne);
  for (std::size_t l = 0; l + 1 < m; ++l) {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      for (std::size_t i = 0; i + 1 < m; ++i) {
        ElementConnectivity::NodeTuple nodes{};
        for (std::size_t a = 0; a < 8; ++a) {
          const auto& c = hex_corners[a];
          nodes[a] = unknown(i + static_cast<std::size_t>(c[0]), j + static_cast<std::size_t>(c[1]),
                             l + static_cast<std::size_t>(c[2]));
        }
        mesh.elements.push_back(nodes);
        mesh.stiffness.push_back(ke);
        mesh.load.push_back(hex_load(static_cast<double>(i) * h, static_cast<double>(j) * h,
                                     static_cast<double>(l) * h, h));
      }
    }
  }
  return mesh;
}

}  // namespace detail

/// Interior system of -lap(u) = cos(x+y) on the unit cube with u = 0 on the
/// boundary. Boundary nodes are eliminated, leaving (m-2)^3 unknowns in
/// lexicographic order (x fastest).
inline LaplaceSystem gen_laplace(const MeshSpec& spec) {
  if (spec.m < 3) throw Error("mesh needs m >= 3 to have interior nodes");
  if (spec.discretization == Discretization::fd7) return detail::gen_fd7(spec);

  auto mesh = detail::hex_mesh(spec);
  auto assembled = assemble_elements(mesh);
  return {std::move(assembled.matrix), std::move(assembled.rhs), std::move(mesh)};
}

struct CraftedSystem {
  CsrMatrix matrix;
  Vector rhs;
};

namespace detail {

inline CsrMatrix dense_to_csr(std::size_t n, const std::vector<double>& dense) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dense[i * n + j] != 0.0) t.push_back({i, j, dense[i * n + j]});
    }
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

// Nonzero pattern of the 10x10 three-band example, 1-based (row, col).
inline const std::vector<std::array<std::size_t, 2>>& fig5_pattern() {
  static const std::vector<std::array<std::size_t, 2>> p{
      {1, 1}, {1, 2}, {1, 4}, {1, 6},           {2, 1},  {2, 2}, {2, 3}, {2, 5},
      {3, 2}, {3, 3}, {3, 4}, {3, 5},           {4, 1},  {4, 3}, {4, 4}, {4, 7}, {4, 10},
      {5, 3}, {5, 5}, {5, 7},                   {6, 1},  {6, 6}, {6, 7}, {6, 9},
      {7, 3}, {7, 5}, {7, 6}, {7, 7}, {7, 10},  {8, 2},  {8, 4}, {8, 8}, {8, 10},
      {9, 6}, {9, 9},                           {10, 4}, {10, 7}, {10, 8}, {10, 10}};
  return p;
}

}  // namespace detail

/// Small fixtures: fig4-example, fig5-10x10, fig5-10x10-dominant,
/// tridiag-<n>, divergent-2x2.
inline CraftedSystem gen_crafted(const std::string& name) {
  auto ones_rhs = [](const CsrMatrix& a) {
    return spmv(a, Vector(a.cols(), 1.0));
  };

  if (name == "fig4-example") {
    CsrMatrix a(5, 5, {0, 2, 4, 6, 9, 11}, {0, 1, 1, 2, 0, 2, 1, 3, 4, 2, 4},
                {-5, 14, 8, 1, 2, 10, 4, 2, 9, 15, 7});
    auto b = ones_rhs(a);
    return {std::move(a), std::move(b)};
  }
  if (name == "fig5-10x10" || name == "fig5-10x10-dominant") {
    const bool dominant = name == "fig5-10x10-dominant";
    std::vector<std::size_t> degree(10, 0);
    for (const auto& [r, c] : detail::fig5_pattern()) {
      if (r != c) ++degree[r - 1];
    }
    std::vector<Triplet> t;
    for (const auto& [r, c] : detail::fig5_pattern()) {
      double v = 1.0;
      if (dominant) v = r == c ? static_cast<double>(degree[r - 1] + 1) : -1.0;
      t.push_back({r - 1, c - 1, v});
    }
    auto a = CsrMatrix::from_triplets(10, 10, std::move(t));
    auto b = ones_rhs(a);
    return {std::move(a), std::move(b)};
  }
  if (name == "divergent-2x2") {
    auto a = detail::dense_to_csr(2, {1, 2, 3, 1});
    auto b = ones_rhs(a);
    return {std::move(a), std::move(b)};
  }
  if (name.rfind("tridiag-", 0) == 0) {
    std::size_t n = 0;
    try {
      n = std::stoul(name.substr(8));
    } catch (const std::exception&) {
      throw Error("bad tridiagonal size in '" + name + "'");
    }
    if (n < 1) throw Error("tridiagonal size must be positive");
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) t.push_back({i, i - 1, -1.0});
      t.push_back({i, i, 2.0});
      if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return {CsrMatrix::from_triplets(n, n, std::move(t)), Vector(n, 1.0)};
  }
  throw Error("unknown crafted matrix '" + name + "'");
}

}  // namespace jsplit
